// Microbenchmarks for the hot paths: seating weights, predictive scoring,
// and a full Gibbs sweep.

#include <benchmark/benchmark.h>

#include "pcrp/conjugate.hpp"
#include "pcrp/datasets.hpp"
#include "pcrp/partition.hpp"
#include "pcrp/sampler.hpp"

using namespace pcrp;

static void BM_seat_weights(benchmark::State& state) {
  const auto partition = sample_prior_partition(static_cast<int>(state.range(0)),
                                                ProcessParams::crp(1.0), 7);
  const auto params = ProcessParams::pcrp(1.0, 1.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(seat_weights(partition, params));
  }
  state.SetItemsProcessed(state.iterations() * partition.num_clusters());
}
BENCHMARK(BM_seat_weights)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_log_posterior_predictive(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(d, d);
  MixtureSpec spec;
  spec.weights = {1.0};
  spec.means = {Eigen::VectorXd::Zero(d)};
  spec.covariances = {cov};
  const Dataset data = generate(spec, 200, 3);
  const NiwParams prior = NiwParams::default_for(data.x);
  ClusterStats stats(d);
  for (int i = 0; i < 100; ++i) stats.add(data.x.row(i));
  const Eigen::VectorXd x = data.x.row(150);
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_posterior_predictive(x, stats, prior));
  }
}
BENCHMARK(BM_log_posterior_predictive)->Arg(2)->Arg(5)->Arg(10);

static void BM_gibbs_sweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Dataset d = generate(sim1_spec(), n, 11);
  const NiwParams prior = NiwParams::default_for(d.x);
  SamplerConfig config;
  config.burn_in = 0;
  config.thin = 1;
  config.seed = 5;
  for (auto _ : state) {
    state.PauseTiming();
    config.iterations = 10;  // amortize setup over a few sweeps
    state.ResumeTiming();
    benchmark::DoNotOptimize(
        run_chain(d.x, ProcessParams::pcrp(1.0, 1.2), prior, config));
  }
  state.SetItemsProcessed(state.iterations() * 10 * n);
}
BENCHMARK(BM_gibbs_sweep)->Arg(100)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
