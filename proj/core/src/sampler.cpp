#include "pcrp/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pcrp/metrics.hpp"
#include "pcrp/rng.hpp"

namespace pcrp {

namespace {

constexpr double kLogPi = 1.1447298858494001741434273513531;

// Student-t predictive with the Cholesky factor and normalizing constant
// precomputed, so scoring a point is O(d^2). One per live cluster, rebuilt
// only when that cluster's statistics change.
struct Predictive {
  double dof;
  Eigen::VectorXd location;
  Eigen::MatrixXd chol_l;  // lower factor of the scale matrix
  double log_const;

  static Predictive from(const ClusterStats& stats, const NiwParams& prior) {
    const StudentT t = posterior_predictive(stats, prior);
    const int d = static_cast<int>(t.location.size());
    Eigen::LLT<Eigen::MatrixXd> llt(t.scale);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("posterior scale matrix lost positive-definiteness");
    Predictive p;
    p.dof = t.dof;
    p.location = t.location;
    p.chol_l = llt.matrixL();
    double log_det = 0.0;
    for (int i = 0; i < d; ++i) log_det += 2.0 * std::log(p.chol_l(i, i));
    p.log_const = std::lgamma((t.dof + d) / 2.0) - std::lgamma(t.dof / 2.0) -
                  0.5 * d * (std::log(t.dof) + kLogPi) - 0.5 * log_det;
    return p;
  }

  double log_density(const Eigen::VectorXd& x) const {
    const double quad =
        chol_l.triangularView<Eigen::Lower>().solve(x - location).squaredNorm();
    return log_const -
           0.5 * (dof + location.size()) * std::log1p(quad / dof);
  }
};

std::vector<ClusterStats> build_stats(const Eigen::MatrixXd& data,
                                      const PartitionState& state) {
  const int d = static_cast<int>(data.cols());
  std::vector<ClusterStats> stats(state.num_clusters(), ClusterStats(d));
  for (int i = 0; i < static_cast<int>(state.assignments.size()); ++i) {
    if (state.assignments[i] >= 0) stats[state.assignments[i]].add(data.row(i));
  }
  return stats;
}

void verify_stats(const std::vector<ClusterStats>& incremental,
                  const std::vector<ClusterStats>& rebuilt, int iteration) {
  if (incremental.size() != rebuilt.size())
    throw std::runtime_error("sufficient-statistic check failed at iteration " +
                             std::to_string(iteration) + ": cluster count mismatch");
  for (std::size_t k = 0; k < rebuilt.size(); ++k) {
    const double err =
        std::max((incremental[k].sum - rebuilt[k].sum).cwiseAbs().maxCoeff(),
                 (incremental[k].scatter - rebuilt[k].scatter).cwiseAbs().maxCoeff());
    if (incremental[k].n != rebuilt[k].n || err > 1e-7)
      throw std::runtime_error("sufficient-statistic check failed at iteration " +
                               std::to_string(iteration) + ", cluster " + std::to_string(k));
  }
}

}  // namespace

void SamplerConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("SamplerConfig: iterations must be >= 1");
  if (burn_in < 0 || burn_in >= iterations)
    throw std::invalid_argument("SamplerConfig: burn_in must be in [0, iterations)");
  if (thin < 1) throw std::invalid_argument("SamplerConfig: thin must be >= 1");
  if (initial_k < 1) throw std::invalid_argument("SamplerConfig: initial_k must be >= 1");
}

int Chain::k_max() const {
  return k_trace.empty() ? 0 : *std::max_element(k_trace.begin(), k_trace.end());
}

Chain run_chain(const Eigen::MatrixXd& data, const ProcessParams& params,
                const NiwParams& prior, const SamplerConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  params.validate();
  prior.validate();
  config.validate();
  const int n = static_cast<int>(data.rows());
  const int d = static_cast<int>(data.cols());
  if (n < 1 || d < 1) throw std::invalid_argument("run_chain: data must be non-empty");
  if (!data.allFinite()) throw std::invalid_argument("run_chain: data must be finite");
  if (d != prior.dim()) throw std::invalid_argument("run_chain: prior dimension mismatch");

  Rng rng(config.seed);

  const int k0 = std::min(config.initial_k, n);
  PartitionState state;
  for (int i = 0; i < n; ++i) state.add_item(std::min(i % k0, state.num_clusters()));
  std::vector<ClusterStats> stats = build_stats(data, state);

  // The new-table predictive never changes.
  const Predictive prior_predictive = Predictive::from(ClusterStats(d), prior);
  std::vector<Predictive> predictive;
  std::vector<bool> fresh;  // predictive[k] matches stats[k]

  auto rebuild_cache = [&] {
    predictive.assign(stats.size(), prior_predictive);
    fresh.assign(stats.size(), false);
  };
  rebuild_cache();

  Chain chain;
  chain.k_trace.reserve(config.iterations);
  chain.samples.reserve(config.retained());

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> logw;

  for (int t = 1; t <= config.iterations; ++t) {
    rng.shuffle(order);
    for (int i : order) {
      const Eigen::VectorXd x = data.row(i);
      const int k_old = state.assignments[i];
      if (state.sizes[k_old] == 1) {
        stats.erase(stats.begin() + k_old);
        predictive.erase(predictive.begin() + k_old);
        fresh.erase(fresh.begin() + k_old);
      } else {
        stats[k_old].remove(x);
        fresh[k_old] = false;
      }
      state.remove_item(i);

      const int k = state.num_clusters();
      try {
        logw = log_seat_weights(state, params);
        for (int c = 0; c < k; ++c) {
          if (!fresh[c]) {
            predictive[c] = Predictive::from(stats[c], prior);
            fresh[c] = true;
          }
          logw[c] += predictive[c].log_density(x);
        }
        logw[k] += prior_predictive.log_density(x);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("run_chain: iteration " + std::to_string(t) + ", item " +
                                 std::to_string(i) + ": " + e.what());
      }

      const double shift = *std::max_element(logw.begin(), logw.end());
      double total = 0.0;
      for (double& v : logw) {
        v = std::exp(v - shift);
        total += v;
      }
      for (double& v : logw) v /= total;

      const int k_new = rng.categorical(logw);
      state.reseat_item(i, k_new);
      if (k_new == k) {
        stats.emplace_back(d);
        predictive.push_back(prior_predictive);
        fresh.push_back(false);
      }
      stats[k_new].add(x);
      fresh[k_new] = false;
    }
    chain.k_trace.push_back(state.num_clusters());

    if (config.check_stats && t % 1000 == 0) {
      verify_stats(stats, build_stats(data, state), t);
    }
    if (t > config.burn_in && (t - config.burn_in) % config.thin == 0) {
      chain.samples.push_back(canonicalize_labels(state.assignments));
    }
  }

  chain.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return chain;
}

std::map<int, double> posterior_k_distribution(const Chain& chain) {
  if (chain.samples.empty())
    throw std::invalid_argument("posterior_k_distribution: chain has no retained samples");
  std::map<int, double> dist;
  for (const auto& sample : chain.samples) {
    const int k = *std::max_element(sample.begin(), sample.end()) + 1;
    dist[k] += 1.0;
  }
  for (auto& [k, v] : dist) v /= static_cast<double>(chain.samples.size());
  return dist;
}

namespace {

std::pair<double, double> mean_and_se(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace

ChainSummary summarize(const Chain& chain, const std::vector<int>* true_labels) {
  if (chain.samples.empty())
    throw std::invalid_argument("summarize: chain has no retained samples");
  ChainSummary s;
  s.k_max = chain.k_max();
  std::vector<double> ks;
  ks.reserve(chain.samples.size());
  for (const auto& sample : chain.samples) {
    ks.push_back(*std::max_element(sample.begin(), sample.end()) + 1.0);
  }
  std::tie(s.mean_k, s.se_k) = mean_and_se(ks);
  if (true_labels != nullptr) {
    if (true_labels->size() != chain.samples.front().size())
      throw std::invalid_argument("summarize: true label length mismatch");
    std::vector<double> nmis, vis;
    nmis.reserve(chain.samples.size());
    vis.reserve(chain.samples.size());
    for (const auto& sample : chain.samples) {
      nmis.push_back(nmi(sample, *true_labels));
      vis.push_back(vi(sample, *true_labels));
    }
    auto [mn, sn] = mean_and_se(nmis);
    auto [mv, sv] = mean_and_se(vis);
    s.mean_nmi = mn;
    s.se_nmi = sn;
    s.mean_vi = mv;
    s.se_vi = sv;
  }
  return s;
}

int map_sample_index(const Chain& chain, const Eigen::MatrixXd& data,
                     const ProcessParams& params, const NiwParams& prior) {
  if (chain.samples.empty())
    throw std::invalid_argument("map_sample_index: chain has no retained samples");
  int best = 0;
  double best_logp = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < chain.samples.size(); ++s) {
    const auto& z = chain.samples[s];
    const int k = *std::max_element(z.begin(), z.end()) + 1;
    double logp = partition_log_probability(z, params);
    for (int c = 0; c < k; ++c) {
      std::vector<Eigen::VectorXd> pts;
      for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] == c) pts.push_back(data.row(i));
      }
      logp += cluster_log_marginal(pts, prior);
    }
    if (logp > best_logp) {
      best_logp = logp;
      best = static_cast<int>(s);
    }
  }
  return best;
}

}  // namespace pcrp
