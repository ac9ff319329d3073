#pragma once

#include <Eigen/Dense>

namespace pcrp {

// Normal-Inverse-Wishart prior on the mean and covariance of one Gaussian
// component.
struct NiwParams {
  Eigen::VectorXd mu0;
  double kappa0 = 0.0;
  double nu0 = 0.0;
  Eigen::MatrixXd psi0;

  int dim() const { return static_cast<int>(mu0.size()); }

  // kappa0 > 0, nu0 > d - 1, psi0 symmetric and positive definite.
  void validate() const;

  // Weakly informative data-adapted default: mu0 = column means,
  // kappa0 = 0.01, nu0 = d + 2, psi0 = sample covariance.
  static NiwParams default_for(const Eigen::MatrixXd& data);
};

// Incremental sufficient statistics of one component: count, running sum
// and running outer-product scatter.
struct ClusterStats {
  int n = 0;
  Eigen::VectorXd sum;
  Eigen::MatrixXd scatter;

  ClusterStats() = default;
  explicit ClusterStats(int d)
      : sum(Eigen::VectorXd::Zero(d)), scatter(Eigen::MatrixXd::Zero(d, d)) {}

  int dim() const { return static_cast<int>(sum.size()); }
  void add(const Eigen::VectorXd& x);
  void remove(const Eigen::VectorXd& x);
};

// Multivariate Student-t in (dof, location, scale) form.
struct StudentT {
  double dof = 0.0;
  Eigen::VectorXd location;
  Eigen::MatrixXd scale;

  double log_density(const Eigen::VectorXd& x) const;
};

// Parameters of the NIW posterior formed from prior + stats:
// kappa_n = kappa0 + n, nu_n = nu0 + n, mu_n = (kappa0 mu0 + sum)/kappa_n,
// psi_n = psi0 + (scatter - sum sum^T/n) + (kappa0 n/kappa_n)(xbar-mu0)(xbar-mu0)^T.
struct NiwPosterior {
  Eigen::VectorXd mu_n;
  double kappa_n = 0.0;
  double nu_n = 0.0;
  Eigen::MatrixXd psi_n;
};
NiwPosterior posterior_params(const ClusterStats& stats, const NiwParams& prior);

// The Student-t predictive obtained by integrating the component mean and
// covariance against the NIW posterior. Throws std::runtime_error if the
// posterior scale matrix is not positive definite (corrupted stats).
StudentT posterior_predictive(const ClusterStats& stats, const NiwParams& prior);

double log_posterior_predictive(const Eigen::VectorXd& x, const ClusterStats& stats,
                                const NiwParams& prior);
double log_prior_predictive(const Eigen::VectorXd& x, const NiwParams& prior);

// log p(points | prior) of one cluster, by the chain rule of predictives.
double cluster_log_marginal(const std::vector<Eigen::VectorXd>& points, const NiwParams& prior);

}  // namespace pcrp
