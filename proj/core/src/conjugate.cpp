#include "pcrp/conjugate.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pcrp {

namespace {
constexpr double kLogPi = 1.1447298858494001741434273513531;
}

void NiwParams::validate() const {
  const int d = dim();
  if (d < 1) throw std::invalid_argument("NiwParams: dimension must be >= 1");
  if (!std::isfinite(kappa0) || kappa0 <= 0.0)
    throw std::invalid_argument("NiwParams: kappa0 must be finite and > 0");
  if (!std::isfinite(nu0) || nu0 <= d - 1)
    throw std::invalid_argument("NiwParams: nu0 must exceed d - 1");
  if (psi0.rows() != d || psi0.cols() != d)
    throw std::invalid_argument("NiwParams: psi0 dimension mismatch");
  if ((psi0 - psi0.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("NiwParams: psi0 must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(psi0);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("NiwParams: psi0 must be positive definite");
}

NiwParams NiwParams::default_for(const Eigen::MatrixXd& data) {
  const int n = static_cast<int>(data.rows());
  const int d = static_cast<int>(data.cols());
  if (n < 2) throw std::invalid_argument("NiwParams::default_for: need at least 2 rows");
  NiwParams p;
  p.mu0 = data.colwise().mean();
  p.kappa0 = 0.01;
  p.nu0 = d + 2;
  Eigen::MatrixXd centered = data.rowwise() - p.mu0.transpose();
  p.psi0 = centered.transpose() * centered / static_cast<double>(n - 1);
  p.psi0 = ((p.psi0 + p.psi0.transpose()) / 2.0).eval();
  p.validate();
  return p;
}

void ClusterStats::add(const Eigen::VectorXd& x) {
  if (x.size() != sum.size())
    throw std::invalid_argument("ClusterStats::add: dimension mismatch");
  if (!x.allFinite()) throw std::invalid_argument("ClusterStats::add: nonfinite point");
  ++n;
  sum += x;
  scatter += x * x.transpose();
}

void ClusterStats::remove(const Eigen::VectorXd& x) {
  if (x.size() != sum.size())
    throw std::invalid_argument("ClusterStats::remove: dimension mismatch");
  if (n < 1) throw std::invalid_argument("ClusterStats::remove: count underflow");
  --n;
  sum -= x;
  scatter -= x * x.transpose();
  if (n == 0) {
    sum.setZero();
    scatter.setZero();
  }
}

double StudentT::log_density(const Eigen::VectorXd& x) const {
  const int d = static_cast<int>(location.size());
  Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("StudentT: scale matrix is not positive definite");
  double log_det = 0.0;
  for (int i = 0; i < d; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  const Eigen::VectorXd delta = x - location;
  const double quad = llt.matrixL().solve(delta).squaredNorm();
  return std::lgamma((dof + d) / 2.0) - std::lgamma(dof / 2.0) -
         0.5 * d * (std::log(dof) + kLogPi) - 0.5 * log_det -
         0.5 * (dof + d) * std::log1p(quad / dof);
}

NiwPosterior posterior_params(const ClusterStats& stats, const NiwParams& prior) {
  const int d = prior.dim();
  NiwPosterior post;
  post.kappa_n = prior.kappa0 + stats.n;
  post.nu_n = prior.nu0 + stats.n;
  if (stats.n == 0) {
    post.mu_n = prior.mu0;
    post.psi_n = prior.psi0;
    return post;
  }
  if (stats.dim() != d) throw std::invalid_argument("posterior_params: dimension mismatch");
  const Eigen::VectorXd xbar = stats.sum / static_cast<double>(stats.n);
  post.mu_n = (prior.kappa0 * prior.mu0 + stats.sum) / post.kappa_n;
  const Eigen::MatrixXd centered_scatter =
      stats.scatter - stats.sum * stats.sum.transpose() / static_cast<double>(stats.n);
  const Eigen::VectorXd dev = xbar - prior.mu0;
  post.psi_n = prior.psi0 + centered_scatter +
               (prior.kappa0 * stats.n / post.kappa_n) * dev * dev.transpose();
  post.psi_n = ((post.psi_n + post.psi_n.transpose()) / 2.0).eval();
  return post;
}

StudentT posterior_predictive(const ClusterStats& stats, const NiwParams& prior) {
  prior.validate();
  const int d = prior.dim();
  const NiwPosterior post = posterior_params(stats, prior);
  StudentT t;
  t.dof = post.nu_n - d + 1;
  t.location = post.mu_n;
  t.scale = post.psi_n * ((post.kappa_n + 1.0) / (post.kappa_n * t.dof));
  return t;
}

double log_posterior_predictive(const Eigen::VectorXd& x, const ClusterStats& stats,
                                const NiwParams& prior) {
  return posterior_predictive(stats, prior).log_density(x);
}

double log_prior_predictive(const Eigen::VectorXd& x, const NiwParams& prior) {
  return posterior_predictive(ClusterStats(prior.dim()), prior).log_density(x);
}

double cluster_log_marginal(const std::vector<Eigen::VectorXd>& points, const NiwParams& prior) {
  ClusterStats stats(prior.dim());
  double logp = 0.0;
  for (const Eigen::VectorXd& x : points) {
    logp += log_posterior_predictive(x, stats, prior);
    stats.add(x);
  }
  return logp;
}

}  // namespace pcrp
