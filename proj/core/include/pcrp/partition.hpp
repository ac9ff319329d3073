#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace pcrp {

enum class ProcessKind { Crp, Pcrp, Gcrp };

// Seating-rule parameters for the CRP family. The occupied-table weight is
// g(size), with g(x) = x for the CRP and g(x) = x^r for the powered CRP; a
// new table gets weight alpha.
struct ProcessParams {
  double alpha = 1.0;
  double power = 1.0;
  ProcessKind kind = ProcessKind::Crp;
  std::function<double(double)> g;  // Gcrp only

  static ProcessParams crp(double alpha);
  static ProcessParams pcrp(double alpha, double power);
  static ProcessParams gcrp(double alpha, std::function<double(double)> g);

  // Throws std::invalid_argument on bad alpha/power; for Gcrp checks
  // g(0) = 0 and monotonicity on a probe grid, and warns (stderr) when
  // g(x) < x somewhere on x > 1.
  void validate() const;

  // log of the occupied-table weight for a table of the given size.
  double log_table_weight(double size) const;
};

// A partition of n_total items into K non-empty clusters, labeled by order
// of appearance (cluster 0 is opened first).
struct PartitionState {
  std::vector<int> assignments;  // length n_total, values in [0, K)
  std::vector<int> sizes;        // length K, all >= 1
  int n_total = 0;

  int num_clusters() const { return static_cast<int>(sizes.size()); }

  static PartitionState empty() { return PartitionState{}; }
  static PartitionState from_assignments(const std::vector<int>& assignments);

  // Seats a new item at cluster k; k == num_clusters() opens a new table.
  void add_item(int k);
  // Unseats item i; an emptied cluster is dropped and later labels shift
  // down so the order-of-appearance canonical form is preserved. The item's
  // assignment slot is marked -1 (it stays in `assignments` for indexing).
  void remove_item(int i);
  // Re-seats a previously removed item i at cluster k.
  void reseat_item(int i, int k);

  // Throws std::invalid_argument if sizes/assignments/n_total disagree or an
  // empty cluster is tracked.
  void validate() const;
};

// Allocation probabilities for the next item given a state from which the
// item has already been removed: K occupied-table entries followed by one
// new-table entry, normalized to sum to 1. Computed in log space with
// max-shift exponentiation so large size^r cannot overflow.
std::vector<double> seat_weights(const PartitionState& state, const ProcessParams& params);

// Same weights in (unnormalized) log space: log g(N_k) for occupied tables
// and log alpha for the new table. This is what the collapsed sampler adds
// to the predictive log densities.
std::vector<double> log_seat_weights(const PartitionState& state, const ProcessParams& params);

// Sequentially seats items 1..n by the process prior. Deterministic in seed.
PartitionState sample_prior_partition(int n, const ProcessParams& params, std::uint64_t seed);

// Relabels an assignment vector into canonical order-of-appearance form
// (first item gets 0, each newly seen cluster the next integer).
std::vector<int> canonicalize_labels(const std::vector<int>& labels);

// Log of the chain-rule product of sequential seating probabilities of the
// given assignment sequence (canonical order-of-appearance labels required:
// first item is cluster 0, each new cluster takes the next integer).
double partition_log_probability(const std::vector<int>& sequence, const ProcessParams& params);

}  // namespace pcrp
