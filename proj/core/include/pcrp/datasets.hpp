#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pcrp {

// Finite Gaussian mixture used to generate synthetic scenarios.
struct MixtureSpec {
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;

  int components() const { return static_cast<int>(weights.size()); }
  int dim() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }
  void validate() const;
};

struct Dataset {
  Eigen::MatrixXd x;  // N x d
  std::optional<std::vector<int>> labels;
  std::string name;

  int n() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
};

Dataset generate(const MixtureSpec& spec, int n, std::uint64_t seed);

// Per-dimension affine transform recorded by standardize().
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& z) const;
};

// Column z-scoring (sample standard deviation). Throws on a zero-variance
// dimension.
std::pair<Dataset, Standardizer> standardize(const Dataset& data);

// CSV with header x1..xd and an optional trailing integer "label" column.
// Values round-trip at 17 significant digits; ',' delimiter, '\n' endings.
Dataset read_csv(const std::string& path);
void write_csv(const Dataset& data, const std::string& path);

// Named simulation presets. Calibration targets, not measured data; both
// are overridable by a user-supplied spec.
MixtureSpec sim1_spec();  // three partially overlapping 2-D Gaussians, K = 3
MixtureSpec sim2_spec();  // two concentric shared-mean components, K = 2

}  // namespace pcrp
