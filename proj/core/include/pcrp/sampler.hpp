#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pcrp/conjugate.hpp"
#include "pcrp/partition.hpp"

namespace pcrp {

struct SamplerConfig {
  int iterations = 20000;
  int burn_in = 10000;
  int thin = 5;
  std::uint64_t seed = 0;
  // 1 means the all-in-one start; larger k assigns points round-robin.
  int initial_k = 1;
  // Rebuild all sufficient statistics from scratch every 1000 sweeps and
  // compare against the incremental versions (debugging aid).
  bool check_stats = false;

  void validate() const;
  int retained() const { return (iterations - burn_in) / thin; }
};

// Retained posterior samples plus the full pre-thinning K trace.
struct Chain {
  std::vector<std::vector<int>> samples;  // retained assignment vectors
  std::vector<int> k_trace;               // one entry per sweep, burn-in included
  double runtime_seconds = 0.0;

  int k_max() const;
};

// Collapsed Gibbs sweep over cluster assignments: each sweep visits the
// items in a fresh random permutation; each item is unseated, scored by
// log seat weight + log predictive density for every occupied table and the
// new table, and re-seated by a max-shift-normalized categorical draw.
// Fully deterministic given the seed.
Chain run_chain(const Eigen::MatrixXd& data, const ProcessParams& params,
                const NiwParams& prior, const SamplerConfig& config);

// Relative frequency of each cluster count over the retained samples.
std::map<int, double> posterior_k_distribution(const Chain& chain);

struct ChainSummary {
  double mean_k = 0.0;
  double se_k = 0.0;
  int k_max = 0;
  std::optional<double> mean_nmi, se_nmi, mean_vi, se_vi;
};

// Mean/SE of K over retained samples, K_max over every sweep including
// burn-in, and per-sample NMI/VI against true labels when provided.
ChainSummary summarize(const Chain& chain, const std::vector<int>* true_labels = nullptr);

// The retained sample with the highest unnormalized joint log probability
// (seating prior in data order + per-cluster marginal likelihoods).
// Returns the index into chain.samples.
int map_sample_index(const Chain& chain, const Eigen::MatrixXd& data,
                     const ProcessParams& params, const NiwParams& prior);

}  // namespace pcrp
