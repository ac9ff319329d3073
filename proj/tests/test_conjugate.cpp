#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pcrp/conjugate.hpp"
#include "pcrp/rng.hpp"

using namespace pcrp;

namespace {

NiwParams unit_prior_1d() {
  NiwParams p;
  p.mu0 = Eigen::VectorXd::Zero(1);
  p.kappa0 = 1.0;
  p.nu0 = 3.0;
  p.psi0 = Eigen::MatrixXd::Identity(1, 1);
  return p;
}

std::vector<Eigen::VectorXd> random_points(int n, int d, std::uint64_t seed,
                                           double spread = 1.0) {
  Rng rng(seed);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) x[j] = spread * rng.normal();
    pts.push_back(x);
  }
  return pts;
}

}  // namespace

TEST_CASE("NiwParams validation") {
  NiwParams p = unit_prior_1d();
  CHECK_NOTHROW(p.validate());
  p.kappa0 = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = unit_prior_1d();
  p.nu0 = 0.0;  // needs nu0 > d - 1 = 0
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = unit_prior_1d();
  p.psi0(0, 0) = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  NiwParams q;
  q.mu0 = Eigen::VectorXd::Zero(2);
  q.kappa0 = 1.0;
  q.nu0 = 4.0;
  q.psi0 = Eigen::MatrixXd::Identity(2, 2);
  q.psi0(0, 1) = 0.5;  // asymmetric
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("ClusterStats add/remove are inverse") {
  ClusterStats s(2);
  Eigen::VectorXd x(2), y(2);
  x << 1.5, -0.3;
  y << -2.0, 4.0;

  SUBCASE("empty + x") {
    s.add(x);
    CHECK(s.n == 1);
    CHECK(s.sum.isApprox(x));
    CHECK(s.scatter.isApprox(x * x.transpose()));
  }
  SUBCASE("add then remove restores the original") {
    s.add(x);
    const ClusterStats before = s;
    s.add(y);
    s.remove(y);
    CHECK(s.n == before.n);
    CHECK((s.sum - before.sum).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((s.scatter - before.scatter).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("underflow throws") {
    CHECK_THROWS_AS(s.remove(x), std::invalid_argument);
  }
  SUBCASE("dimension mismatch throws") {
    CHECK_THROWS_AS(s.add(Eigen::VectorXd::Zero(3)), std::invalid_argument);
  }
}

TEST_CASE("folded stats equal the batch computation") {
  for (int d : {1, 3}) {
    const auto pts = random_points(40, d, 21 + d, 2.5);
    ClusterStats inc(d);
    for (const auto& x : pts) inc.add(x);
    const ClusterStats batch = oracles::batch_stats(pts, d);
    CHECK(inc.n == batch.n);
    CHECK((inc.sum - batch.sum).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((inc.scatter - batch.scatter).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("empty-stats posterior predictive equals the prior predictive") {
  const NiwParams prior = unit_prior_1d();
  const ClusterStats empty(1);
  Eigen::VectorXd x(1);
  for (double v : {-3.0, 0.0, 0.7, 10.0}) {
    x[0] = v;
    CHECK(log_posterior_predictive(x, empty, prior) ==
          doctest::Approx(log_prior_predictive(x, prior)).epsilon(1e-15));
  }
}

TEST_CASE("predictive matches Monte Carlo integration (1d prior, x = 0)") {
  const NiwParams prior = unit_prior_1d();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  const double closed = std::exp(log_prior_predictive(x, prior));
  const double mc = oracles::mc_predictive_density(x, {}, prior, 1000000, 2024);
  CHECK(std::abs(mc - closed) < 0.01 * closed);
}

TEST_CASE("predictive matches Monte Carlo with data, d = 2") {
  NiwParams prior;
  prior.mu0 = Eigen::Vector2d(0.5, -0.5);
  prior.kappa0 = 0.8;
  prior.nu0 = 5.0;
  prior.psi0 = Eigen::Matrix2d::Identity() * 1.5;
  prior.psi0(0, 1) = prior.psi0(1, 0) = 0.4;

  const auto pts = random_points(12, 2, 7, 1.2);
  const ClusterStats stats = oracles::batch_stats(pts, 2);
  Eigen::VectorXd x = stats.sum / stats.n;  // probe near the posterior mean
  x[0] += 0.3;

  const double closed = std::exp(log_posterior_predictive(x, stats, prior));
  const double mc = oracles::mc_predictive_density(x, pts, prior, 1000000, 99);
  CHECK(std::abs(mc - closed) < 0.01 * closed);
}

TEST_CASE("1d predictive integrates to 1 (trapezoid quadrature)") {
  const NiwParams prior = unit_prior_1d();
  const auto pts = random_points(5, 1, 11, 2.0);
  const ClusterStats stats = oracles::batch_stats(pts, 1);
  const double lo = -60.0, hi = 60.0;
  const int steps = 200000;
  const double h = (hi - lo) / steps;
  double integral = 0.0;
  Eigen::VectorXd x(1);
  for (int i = 0; i <= steps; ++i) {
    x[0] = lo + i * h;
    const double f = std::exp(log_posterior_predictive(x, stats, prior));
    integral += (i == 0 || i == steps) ? 0.5 * f : f;
  }
  integral *= h;
  CHECK(std::abs(integral - 1.0) < 1e-3);
}

TEST_CASE("incremental posterior parameters equal the from-scratch ones") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(5));
    const int n = 1 + static_cast<int>(rng.below(200));
    NiwParams prior;
    prior.mu0 = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j) prior.mu0[j] = rng.normal();
    prior.kappa0 = 0.1 + rng.uniform();
    prior.nu0 = d + 1 + 3.0 * rng.uniform();
    prior.psi0 = Eigen::MatrixXd::Identity(d, d) * (0.5 + rng.uniform());

    const auto pts = random_points(n, d, 1000 + trial, 3.0);
    ClusterStats inc(d);
    for (const auto& p : pts) inc.add(p);
    const auto post = posterior_params(inc, prior);
    const auto ref = oracles::niw_posterior_ref(pts, prior);
    CHECK(std::abs(post.kappa_n - ref.kappa) < 1e-12);
    CHECK(std::abs(post.nu_n - ref.nu) < 1e-12);
    CHECK((post.mu_n - ref.mu).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((post.psi_n - ref.psi).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("predictive is exchangeable in insertion order") {
  const auto pts = random_points(30, 2, 5, 1.5);
  NiwParams prior;
  prior.mu0 = Eigen::Vector2d::Zero();
  prior.kappa0 = 0.3;
  prior.nu0 = 4.0;
  prior.psi0 = Eigen::Matrix2d::Identity();

  ClusterStats forward(2), backward(2), shuffled(2);
  for (const auto& p : pts) forward.add(p);
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) backward.add(*it);
  std::vector<Eigen::VectorXd> mixed = pts;
  std::mt19937 eng(3);
  std::shuffle(mixed.begin(), mixed.end(), eng);
  for (const auto& p : mixed) shuffled.add(p);

  Eigen::VectorXd x = Eigen::Vector2d(0.4, -1.0);
  const double ref = log_posterior_predictive(x, forward, prior);
  CHECK(std::abs(log_posterior_predictive(x, backward, prior) - ref) < 1e-9);
  CHECK(std::abs(log_posterior_predictive(x, shuffled, prior) - ref) < 1e-9);
}

TEST_CASE("predictive mean approaches the sample mean as n grows") {
  const int n = 10000;
  Rng rng(31);
  std::vector<Eigen::VectorXd> pts;
  Eigen::VectorXd total = Eigen::VectorXd::Zero(1);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(1);
    x[0] = 2.0 + 0.7 * rng.normal();
    pts.push_back(x);
    total += x;
  }
  NiwParams prior = unit_prior_1d();
  const ClusterStats stats = oracles::batch_stats(pts, 1);
  const StudentT t = posterior_predictive(stats, prior);
  const double sample_mean = total[0] / n;
  const double se = 0.7 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(t.location[0] - sample_mean) < 3.0 * se);
}

TEST_CASE("corrupted stats surface as a runtime error") {
  NiwParams prior = unit_prior_1d();
  ClusterStats bad(1);
  bad.n = 5;
  bad.sum[0] = 0.0;
  bad.scatter(0, 0) = -100.0;  // impossible scatter
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(log_posterior_predictive(x, bad, prior), std::runtime_error);
}
