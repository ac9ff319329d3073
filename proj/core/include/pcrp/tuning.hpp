#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pcrp/conjugate.hpp"
#include "pcrp/sampler.hpp"

namespace pcrp {

struct GridSpec {
  double start = 1.01;
  double step = 0.05;
  double max_r = 3.0;

  void validate() const;
  std::vector<double> points() const;
};

// Dense near 1 where tuned powers tend to land: 0.01 steps up to 1.2, then
// 0.05 steps up to 3.
std::vector<double> default_grid();

struct CvCurve {
  std::vector<double> grid;
  std::vector<double> losses;  // one mean loss per evaluated grid point
  double chosen_r = 0.0;
  int chosen_index = -1;
  bool inflection_found = false;
};

// Jump detector: the jump is the first loss exceeding min(losses seen so
// far) times jump_factor; returns the index of the last point before the
// jump, or -1 when the sequence never jumps.
int detect_jump(const std::vector<double>& losses, double jump_factor);

// Ascending scan over the grid: one chain per grid point, mean cv_loss over
// its retained samples, early stop at the first jump. chosen_r is the last
// grid point before the jump; without a jump the curve is returned with
// inflection_found = false and chosen_r = max grid point.
CvCurve tune_power(const Eigen::MatrixXd& train_data, const std::vector<double>& grid,
                   const NiwParams& prior, double alpha, const SamplerConfig& config,
                   double jump_factor = 1.5);

// alpha making the CRP prior mean cluster count alpha * ln(n) equal true_k.
double oracle_alpha(int true_k, int n);

}  // namespace pcrp
