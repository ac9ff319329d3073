#include "pcrp/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace pcrp {

namespace {

// Compact arbitrary labels to 0..K-1 by first appearance.
std::vector<int> compact(const std::vector<int>& labels, int& k_out) {
  std::unordered_map<int, int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, fresh] = remap.try_emplace(labels[i], static_cast<int>(remap.size()));
    (void)fresh;
    out[i] = it->second;
  }
  k_out = static_cast<int>(remap.size());
  return out;
}

double entropy(const Eigen::VectorXi& counts, int n) {
  double h = 0.0;
  for (int i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) {
      const double p = static_cast<double>(counts[i]) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

double mutual_information(const Contingency& c) {
  double mi = 0.0;
  for (int i = 0; i < c.counts.rows(); ++i) {
    for (int j = 0; j < c.counts.cols(); ++j) {
      const int nij = c.counts(i, j);
      if (nij > 0) {
        mi += (static_cast<double>(nij) / c.n) *
              std::log(static_cast<double>(nij) * c.n /
                       (static_cast<double>(c.row_sums[i]) * c.col_sums[j]));
      }
    }
  }
  return std::max(mi, 0.0);  // clamp the -0.0 / 1e-17 roundoff
}

}  // namespace

Contingency Contingency::from_labels(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("Contingency: label vectors differ in length");
  if (a.empty()) throw std::invalid_argument("Contingency: empty labelings");
  int ka = 0, kb = 0;
  const std::vector<int> ca = compact(a, ka);
  const std::vector<int> cb = compact(b, kb);
  Contingency c;
  c.n = static_cast<int>(a.size());
  c.counts = Eigen::MatrixXi::Zero(ka, kb);
  for (std::size_t i = 0; i < ca.size(); ++i) ++c.counts(ca[i], cb[i]);
  c.row_sums = c.counts.rowwise().sum();
  c.col_sums = c.counts.colwise().sum();
  return c;
}

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
  const Contingency c = Contingency::from_labels(a, b);
  const double ha = entropy(c.row_sums, c.n);
  const double hb = entropy(c.col_sums, c.n);
  if (ha == 0.0 && hb == 0.0) return 1.0;  // both trivial, hence identical
  if (ha == 0.0 || hb == 0.0) return 0.0;
  return 2.0 * mutual_information(c) / (ha + hb);
}

double vi(const std::vector<int>& a, const std::vector<int>& b) {
  const Contingency c = Contingency::from_labels(a, b);
  const double v =
      entropy(c.row_sums, c.n) + entropy(c.col_sums, c.n) - 2.0 * mutual_information(c);
  return std::max(v, 0.0);
}

double cv_loss(const Eigen::MatrixXd& data, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(data.rows()) != labels.size())
    throw std::invalid_argument("cv_loss: labels length must match rows");
  int k = 0;
  const std::vector<int> z = compact(labels, k);
  const int d = static_cast<int>(data.cols());
  // Two passes (means, then squared deviations) so a rigid translation of
  // the data cannot leak cancellation error into the loss.
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(k, d);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
  for (int i = 0; i < data.rows(); ++i) {
    means.row(z[i]) += data.row(i);
    ++counts[z[i]];
  }
  for (int c = 0; c < k; ++c) means.row(c) /= counts[c];
  Eigen::VectorXd wss = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < data.rows(); ++i) {
    wss[z[i]] += (data.row(i) - means.row(z[i])).squaredNorm();
  }
  double loss = 0.0;
  for (int c = 0; c < k; ++c) loss += std::sqrt(wss[c]);
  return loss;
}

}  // namespace pcrp
