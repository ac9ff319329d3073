#include "pcrp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "pcrp/rng.hpp"

namespace pcrp {

ProcessParams ProcessParams::crp(double alpha) {
  ProcessParams p;
  p.alpha = alpha;
  p.power = 1.0;
  p.kind = ProcessKind::Crp;
  p.validate();
  return p;
}

ProcessParams ProcessParams::pcrp(double alpha, double power) {
  ProcessParams p;
  p.alpha = alpha;
  p.power = power;
  p.kind = ProcessKind::Pcrp;
  p.validate();
  return p;
}

ProcessParams ProcessParams::gcrp(double alpha, std::function<double(double)> g) {
  ProcessParams p;
  p.alpha = alpha;
  p.power = 1.0;
  p.kind = ProcessKind::Gcrp;
  p.g = std::move(g);
  p.validate();
  return p;
}

void ProcessParams::validate() const {
  if (!std::isfinite(alpha) || alpha <= 0.0)
    throw std::invalid_argument("ProcessParams: alpha must be finite and > 0");
  if (!std::isfinite(power))
    throw std::invalid_argument("ProcessParams: power must be finite");
  if (power < 1.0)
    throw std::invalid_argument("ProcessParams: power must be >= 1");
  if (kind == ProcessKind::Gcrp) {
    if (!g) throw std::invalid_argument("ProcessParams: Gcrp requires a g function");
    if (g(0.0) != 0.0)
      throw std::invalid_argument("ProcessParams: g(0) must be 0");
    // Probe grid: monotone check is a hard error, g(x) >= x on x > 1 is a
    // design guideline and only warned about.
    const double probe[] = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 50.0, 200.0, 1000.0};
    bool warned = false;
    for (std::size_t i = 1; i < std::size(probe); ++i) {
      const double lo = g(probe[i - 1]), hi = g(probe[i]);
      if (!std::isfinite(hi) || hi < lo)
        throw std::invalid_argument("ProcessParams: g must be nondecreasing");
      if (!warned && probe[i] > 1.0 && hi < probe[i]) {
        std::fprintf(stderr,
                     "pcrp: warning: g(%g) = %g < %g; shrinkage of small clusters "
                     "needs g(x) >= x for x > 1\n",
                     probe[i], hi, probe[i]);
        warned = true;
      }
    }
  }
}

double ProcessParams::log_table_weight(double size) const {
  switch (kind) {
    case ProcessKind::Crp:
      return std::log(size);
    case ProcessKind::Pcrp:
      return power * std::log(size);
    case ProcessKind::Gcrp:
      return std::log(g(size));
  }
  throw std::logic_error("unreachable");
}

PartitionState PartitionState::from_assignments(const std::vector<int>& assignments) {
  PartitionState s;
  for (int z : assignments) {
    if (z < 0 || z > s.num_clusters())
      throw std::invalid_argument("PartitionState: assignments must be canonical order-of-appearance labels");
    s.add_item(z);
  }
  return s;
}

void PartitionState::add_item(int k) {
  const int K = num_clusters();
  if (k < 0 || k > K) throw std::invalid_argument("PartitionState::add_item: bad cluster index");
  if (k == K)
    sizes.push_back(1);
  else
    ++sizes[k];
  assignments.push_back(k);
  ++n_total;
}

void PartitionState::remove_item(int i) {
  if (i < 0 || i >= static_cast<int>(assignments.size()))
    throw std::invalid_argument("PartitionState::remove_item: bad item index");
  const int k = assignments[i];
  if (k < 0) throw std::invalid_argument("PartitionState::remove_item: item already removed");
  assignments[i] = -1;
  --n_total;
  if (--sizes[k] == 0) {
    sizes.erase(sizes.begin() + k);
    for (int& z : assignments)
      if (z > k) --z;
  }
}

void PartitionState::reseat_item(int i, int k) {
  const int K = num_clusters();
  if (i < 0 || i >= static_cast<int>(assignments.size()) || assignments[i] != -1)
    throw std::invalid_argument("PartitionState::reseat_item: item is not removed");
  if (k < 0 || k > K) throw std::invalid_argument("PartitionState::reseat_item: bad cluster index");
  if (k == K)
    sizes.push_back(1);
  else
    ++sizes[k];
  assignments[i] = k;
  ++n_total;
}

void PartitionState::validate() const {
  std::vector<int> counted(sizes.size(), 0);
  int seated = 0;
  for (int z : assignments) {
    if (z == -1) continue;
    if (z < 0 || z >= num_clusters())
      throw std::invalid_argument("PartitionState: assignment out of range");
    ++counted[z];
    ++seated;
  }
  if (seated != n_total)
    throw std::invalid_argument("PartitionState: n_total disagrees with assignments");
  for (int k = 0; k < num_clusters(); ++k) {
    if (sizes[k] < 1)
      throw std::invalid_argument("PartitionState: empty cluster tracked");
    if (sizes[k] != counted[k])
      throw std::invalid_argument("PartitionState: sizes disagree with assignments");
  }
}

std::vector<double> log_seat_weights(const PartitionState& state, const ProcessParams& params) {
  params.validate();
  const int K = state.num_clusters();
  std::vector<double> logw(K + 1);
  for (int k = 0; k < K; ++k) {
    if (state.sizes[k] < 1)
      throw std::invalid_argument("seat_weights: state contains an empty cluster");
    logw[k] = params.log_table_weight(static_cast<double>(state.sizes[k]));
  }
  logw[K] = std::log(params.alpha);
  return logw;
}

std::vector<double> seat_weights(const PartitionState& state, const ProcessParams& params) {
  std::vector<double> w = log_seat_weights(state, params);
  const double shift = *std::max_element(w.begin(), w.end());
  double total = 0.0;
  for (double& v : w) {
    v = std::exp(v - shift);
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

PartitionState sample_prior_partition(int n, const ProcessParams& params, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_prior_partition: n must be >= 1");
  params.validate();
  Rng rng(seed);
  PartitionState state;
  for (int i = 0; i < n; ++i) {
    state.add_item(rng.categorical(seat_weights(state, params)));
  }
  return state;
}

std::vector<int> canonicalize_labels(const std::vector<int>& labels) {
  std::vector<int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = std::find(remap.begin(), remap.end(), labels[i]);
    if (it == remap.end()) {
      out[i] = static_cast<int>(remap.size());
      remap.push_back(labels[i]);
    } else {
      out[i] = static_cast<int>(it - remap.begin());
    }
  }
  return out;
}

double partition_log_probability(const std::vector<int>& sequence, const ProcessParams& params) {
  params.validate();
  PartitionState state;
  double logp = 0.0;
  for (int z : sequence) {
    const int K = state.num_clusters();
    if (z < 0 || z > K)
      throw std::invalid_argument(
          "partition_log_probability: sequence is not in canonical order-of-appearance form");
    const std::vector<double> w = seat_weights(state, params);
    logp += std::log(w[z]);
    state.add_item(z);
  }
  return logp;
}

}  // namespace pcrp
