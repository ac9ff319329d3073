#include "pcrp/tuning.hpp"

#include <cmath>
#include <stdexcept>

#include "pcrp/metrics.hpp"

namespace pcrp {

void GridSpec::validate() const {
  if (!(start > 1.0)) throw std::invalid_argument("GridSpec: start must be > 1");
  if (!(step > 0.0)) throw std::invalid_argument("GridSpec: step must be > 0");
  if (max_r < start) throw std::invalid_argument("GridSpec: max_r must be >= start");
}

std::vector<double> GridSpec::points() const {
  validate();
  std::vector<double> grid;
  for (double r = start; r <= max_r + 1e-12; r += step) grid.push_back(r);
  return grid;
}

std::vector<double> default_grid() {
  std::vector<double> grid;
  for (double r = 1.01; r < 1.2 - 1e-12; r += 0.01) grid.push_back(r);
  for (double r = 1.2; r <= 3.0 + 1e-12; r += 0.05) grid.push_back(r);
  return grid;
}

int detect_jump(const std::vector<double>& losses, double jump_factor) {
  if (jump_factor <= 1.0) throw std::invalid_argument("detect_jump: jump_factor must be > 1");
  double running_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (i > 0 && losses[i] > running_min * jump_factor) return static_cast<int>(i) - 1;
    running_min = std::min(running_min, losses[i]);
  }
  return -1;
}

CvCurve tune_power(const Eigen::MatrixXd& train_data, const std::vector<double>& grid,
                   const NiwParams& prior, double alpha, const SamplerConfig& config,
                   double jump_factor) {
  if (grid.empty()) throw std::invalid_argument("tune_power: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 1.0) || (i > 0 && grid[i] <= grid[i - 1]))
      throw std::invalid_argument("tune_power: grid must be strictly increasing with points > 1");
  }
  if (jump_factor <= 1.0) throw std::invalid_argument("tune_power: jump_factor must be > 1");

  CvCurve curve;
  double running_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SamplerConfig point_config = config;
    // Independent stream per grid point, so concurrent evaluation of the
    // full grid and the sequential early-stopped scan agree.
    point_config.seed = config.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1));
    const Chain chain =
        run_chain(train_data, ProcessParams::pcrp(alpha, grid[i]), prior, point_config);
    double loss = 0.0;
    for (const auto& sample : chain.samples) loss += cv_loss(train_data, sample);
    loss /= static_cast<double>(chain.samples.size());
    curve.grid.push_back(grid[i]);
    curve.losses.push_back(loss);
    if (i > 0 && loss > running_min * jump_factor) {
      curve.inflection_found = true;
      curve.chosen_index = static_cast<int>(i) - 1;
      curve.chosen_r = grid[i - 1];
      return curve;
    }
    running_min = std::min(running_min, loss);
  }
  curve.inflection_found = false;
  curve.chosen_index = static_cast<int>(curve.grid.size()) - 1;
  curve.chosen_r = curve.grid.back();
  return curve;
}

double oracle_alpha(int true_k, int n) {
  if (true_k < 1) throw std::invalid_argument("oracle_alpha: true_k must be >= 1");
  if (n < 2) throw std::invalid_argument("oracle_alpha: n must be >= 2");
  return static_cast<double>(true_k) / std::log(static_cast<double>(n));
}

}  // namespace pcrp
