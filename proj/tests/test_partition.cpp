#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "oracles.hpp"
#include "pcrp/partition.hpp"
#include "pcrp/rng.hpp"

using namespace pcrp;

TEST_CASE("seat_weights matches hand-computed examples") {
  SUBCASE("sizes [1,1], alpha 1, CRP: uniform over three options") {
    auto state = PartitionState::from_assignments({0, 1});
    auto w = seat_weights(state, ProcessParams::crp(1.0));
    REQUIRE(w.size() == 3);
    for (double v : w) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("single table of size N, pCRP: new-table probability alpha/(N^r+alpha)") {
    for (int n : {1, 5, 50}) {
      for (double r : {1.0, 2.0, 3.0}) {
        PartitionState state;
        for (int i = 0; i < n; ++i) state.add_item(0);
        const double alpha = 0.7;
        auto w = seat_weights(state, ProcessParams::pcrp(alpha, r));
        CHECK(w.back() ==
              doctest::Approx(alpha / (std::pow(n, r) + alpha)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("sizes [4,1], alpha 1, pCRP r=2 -> [16/18, 1/18, 1/18]") {
    auto state = PartitionState::from_assignments({0, 0, 0, 0, 1});
    auto w = seat_weights(state, ProcessParams::pcrp(1.0, 2.0));
    CHECK(w[0] == doctest::Approx(16.0 / 18.0).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(1.0 / 18.0).epsilon(1e-14));
    CHECK(w[2] == doctest::Approx(1.0 / 18.0).epsilon(1e-14));
  }
  SUBCASE("pCRP r=1 equals CRP") {
    auto state = PartitionState::from_assignments({0, 0, 1, 1, 1});
    auto wc = seat_weights(state, ProcessParams::crp(0.5));
    auto wp = seat_weights(state, ProcessParams::pcrp(0.5, 1.0));
    REQUIRE(wc.size() == wp.size());
    for (std::size_t i = 0; i < wc.size(); ++i)
      CHECK(wc[i] == doctest::Approx(wp[i]).epsilon(1e-15));
  }
}

TEST_CASE("seat_weights r=1 reduction over random states") {
  Rng rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(6));
    PartitionState state;
    for (int c = 0; c < k; ++c) {
      const int size = 1 + static_cast<int>(rng.below(30));
      for (int j = 0; j < size; ++j) state.add_item(c);
    }
    const double alpha = 0.05 + 5.0 * rng.uniform();
    auto wc = seat_weights(state, ProcessParams::crp(alpha));
    auto wp = seat_weights(state, ProcessParams::pcrp(alpha, 1.0));
    for (std::size_t i = 0; i < wc.size(); ++i)
      CHECK(std::abs(wc[i] - wp[i]) < 1e-14);
  }
}

TEST_CASE("seat_weights normalization and validation") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    PartitionState state;
    const int k = 1 + static_cast<int>(rng.below(8));
    for (int c = 0; c < k; ++c)
      for (int j = 0, s = 1 + static_cast<int>(rng.below(200)); j < s; ++j) state.add_item(c);
    const double r = 1.0 + 9.0 * rng.uniform();  // up to r = 10 without overflow
    auto w = seat_weights(state, ProcessParams::pcrp(0.3, r));
    CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) < 1e-12);
    for (double v : w) CHECK(v >= 0.0);
  }

  PartitionState corrupt = PartitionState::from_assignments({0, 0, 1});
  corrupt.sizes[1] = 0;
  CHECK_THROWS_AS(seat_weights(corrupt, ProcessParams::crp(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(ProcessParams::crp(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ProcessParams::crp(std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProcessParams::pcrp(1.0, std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProcessParams::pcrp(1.0, 0.5), std::invalid_argument);  // r < 1 rejected
}

TEST_CASE("g-CRP validation and power-function equivalence") {
  CHECK_THROWS_AS(ProcessParams::gcrp(1.0, [](double x) { return x + 1.0; }),
                  std::invalid_argument);  // g(0) != 0
  CHECK_THROWS_AS(ProcessParams::gcrp(1.0, [](double x) { return -x; }),
                  std::invalid_argument);  // decreasing

  auto g2 = ProcessParams::gcrp(0.8, [](double x) { return x * x; });
  auto p2 = ProcessParams::pcrp(0.8, 2.0);
  auto state = PartitionState::from_assignments({0, 0, 0, 1, 1, 2});
  auto wg = seat_weights(state, g2);
  auto wp = seat_weights(state, p2);
  for (std::size_t i = 0; i < wg.size(); ++i)
    CHECK(wg[i] == doctest::Approx(wp[i]).epsilon(1e-13));
}

TEST_CASE("proportional invariance of the power weight") {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const double c = 0.1 + 20.0 * rng.uniform();
    const double n1 = 0.5 + 50.0 * rng.uniform();
    const double n2 = 0.5 + 50.0 * rng.uniform();
    const double r = 1.0 + 4.0 * rng.uniform();
    const double scale = 0.2 + 3.0 * rng.uniform();
    auto g = [&](double x) { return scale * std::pow(x, r); };
    const double lhs = g(c * n1) / g(c * n2);
    const double rhs = g(n1) / g(n2);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
  }

  // Occupied-table conditional distribution is unchanged when all sizes are
  // scaled by a common integer factor.
  for (int factor : {2, 3, 7}) {
    auto params = ProcessParams::pcrp(1.3, 1.7);
    auto base = PartitionState::from_assignments({0, 0, 0, 1, 1, 2});
    PartitionState scaled;
    for (int k = 0; k < base.num_clusters(); ++k)
      for (int j = 0; j < base.sizes[k] * factor; ++j) scaled.add_item(k);
    auto wb = seat_weights(base, params);
    auto ws = seat_weights(scaled, params);
    const double zb = std::accumulate(wb.begin(), wb.end() - 1, 0.0);
    const double zs = std::accumulate(ws.begin(), ws.end() - 1, 0.0);
    for (int k = 0; k < base.num_clusters(); ++k)
      CHECK(wb[k] / zb == doctest::Approx(ws[k] / zs).epsilon(1e-12));
  }
}

TEST_CASE("rich-get-richer amplification for r > 1") {
  Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const int n2 = 1 + static_cast<int>(rng.below(20));
    const int n1 = n2 + 1 + static_cast<int>(rng.below(20));
    const double r = 1.0 + 1e-6 + 4.0 * rng.uniform();
    const double ratio_pcrp = std::pow(n1, r) / std::pow(n2, r);
    const double ratio_crp = static_cast<double>(n1) / n2;
    CHECK(ratio_pcrp > ratio_crp);
  }
}

TEST_CASE("sample_prior_partition basics") {
  SUBCASE("n=1 gives a single cluster") {
    auto s = sample_prior_partition(1, ProcessParams::pcrp(2.0, 3.0), 5);
    CHECK(s.num_clusters() == 1);
    CHECK(s.sizes[0] == 1);
    s.validate();
  }
  SUBCASE("deterministic in the seed") {
    auto a = sample_prior_partition(200, ProcessParams::crp(1.0), 42);
    auto b = sample_prior_partition(200, ProcessParams::crp(1.0), 42);
    CHECK(a.assignments == b.assignments);
  }
  SUBCASE("states satisfy the invariants") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto s = sample_prior_partition(500, ProcessParams::pcrp(1.0, 1.5), seed);
      s.validate();
      CHECK(s.n_total == 500);
    }
  }
}

TEST_CASE("CRP prior mean cluster count matches the harmonic sum") {
  const int n = 10000;
  const double alpha = 1.0;
  double expected = 0.0;
  for (int i = 1; i <= n; ++i) expected += alpha / (alpha + i - 1);

  double mean_k = 0.0;
  const int reps = 500;
  for (int rep = 0; rep < reps; ++rep) {
    mean_k += sample_prior_partition(n, ProcessParams::crp(alpha), 1000 + rep).num_clusters();
  }
  mean_k /= reps;
  CHECK(std::abs(mean_k - expected) < 0.15 * expected);
}

TEST_CASE("pCRP all-singletons frequency matches the sequential product") {
  // n=3, r=3, alpha=1: P(all singletons) = 1 * 1/2 * 1/3 = 1/6 (sizes are
  // all 1, so the power never bites before the third seat).
  const auto params = ProcessParams::pcrp(1.0, 3.0);
  const int reps = 100000;
  int hits = 0;
  for (int rep = 0; rep < reps; ++rep) {
    if (sample_prior_partition(3, params, rep).num_clusters() == 3) ++hits;
  }
  const double freq = static_cast<double>(hits) / reps;
  const double p = 1.0 / 6.0;
  const double se = std::sqrt(p * (1 - p) / reps);
  CHECK(std::abs(freq - p) < 4.0 * se);
}

TEST_CASE("partition_log_probability examples") {
  CHECK(partition_log_probability({0}, ProcessParams::crp(1.0)) == 0.0);

  SUBCASE("CRP: [0,0,1] and [0,1,0] have equal probability") {
    const auto crp = ProcessParams::crp(1.0);
    CHECK(partition_log_probability({0, 0, 1}, crp) ==
          doctest::Approx(partition_log_probability({0, 1, 0}, crp)).epsilon(1e-14));
  }
  SUBCASE("joining the size-2 table: CRP 2/3 vs pCRP r=2 4/5; new table 1/5 < 1/3") {
    auto two = PartitionState::from_assignments({0, 0});
    auto wc = seat_weights(two, ProcessParams::crp(1.0));
    auto wp = seat_weights(two, ProcessParams::pcrp(1.0, 2.0));
    CHECK(wc[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(wp[0] == doctest::Approx(4.0 / 5.0).epsilon(1e-14));
    CHECK(wp[1] == doctest::Approx(1.0 / 5.0).epsilon(1e-14));
    CHECK(wp[1] < wc[1]);
  }
  SUBCASE("non-canonical labelings are rejected") {
    CHECK_THROWS_AS(partition_log_probability({1, 0}, ProcessParams::crp(1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(partition_log_probability({0, 2}, ProcessParams::crp(1.0)),
                    std::invalid_argument);
  }
}

TEST_CASE("CRP exchangeability for N <= 6, exhaustively") {
  const auto crp = ProcessParams::crp(0.8);
  for (int n = 2; n <= 6; ++n) {
    for (const auto& rgs : oracles::set_partitions(n)) {
      // Reference probability of this set partition from one ordering.
      const double ref = partition_log_probability(rgs, crp);
      // All orderings of the items inducing the same set partition.
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      do {
        std::vector<int> permuted(n);
        for (int i = 0; i < n; ++i) permuted[i] = rgs[perm[i]];
        CHECK(partition_log_probability(canonicalize_labels(permuted), crp) ==
              doctest::Approx(ref).epsilon(1e-12));
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
}

TEST_CASE("pCRP non-exchangeability witness") {
  // Two orderings of the same multiset of cluster sizes {2,1} differ for r > 1.
  for (double r : {1.5, 2.0, 4.0}) {
    const auto p = ProcessParams::pcrp(1.0, r);
    const double a = partition_log_probability({0, 0, 1}, p);
    const double b = partition_log_probability({0, 1, 1}, p);
    CHECK(std::abs(a - b) > 1e-9);
  }
  // Three-customer inequality: p(new | sizes [2]) < p(new | sizes [1,1]).
  pcrp::Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double r = 1.0 + 1e-9 + 5.0 * rng.uniform();
    const double alpha = 0.01 + 10.0 * rng.uniform();
    auto joined = PartitionState::from_assignments({0, 0});
    auto split = PartitionState::from_assignments({0, 1});
    const auto p = ProcessParams::pcrp(alpha, r);
    CHECK(seat_weights(joined, p).back() < seat_weights(split, p).back());
  }
}

TEST_CASE("PartitionState bookkeeping") {
  auto s = PartitionState::from_assignments({0, 1, 1, 2, 0});
  s.validate();
  CHECK(s.sizes == std::vector<int>{2, 2, 1});

  s.remove_item(3);  // singleton cluster 2 dies
  s.validate();
  CHECK(s.num_clusters() == 2);
  CHECK(s.n_total == 4);

  s.reseat_item(3, 2);  // opens a fresh table
  s.validate();
  CHECK(s.sizes == std::vector<int>{2, 2, 1});

  // Dropping a middle cluster shifts the later labels down.
  auto t = PartitionState::from_assignments({0, 1, 2});
  t.remove_item(1);
  t.validate();
  CHECK(t.assignments == std::vector<int>{0, -1, 1});

  CHECK_THROWS_AS(PartitionState::from_assignments({1, 0}), std::invalid_argument);
}
