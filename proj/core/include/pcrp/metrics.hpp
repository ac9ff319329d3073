#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pcrp {

// Joint count table of two labelings of the same items.
struct Contingency {
  Eigen::MatrixXi counts;   // K1 x K2
  Eigen::VectorXi row_sums; // size K1
  Eigen::VectorXi col_sums; // size K2
  int n = 0;

  static Contingency from_labels(const std::vector<int>& a, const std::vector<int>& b);
};

// Normalized mutual information, NMI = 2 I(A;B) / (H(A) + H(B)), in [0, 1].
// Both entropies zero (two single-cluster partitions) -> 1; exactly one
// entropy zero -> 0. Natural logarithms.
double nmi(const std::vector<int>& a, const std::vector<int>& b);

// Variation of information, H(A) + H(B) - 2 I(A;B), in nats.
double vi(const std::vector<int>& a, const std::vector<int>& b);

// Sum over clusters of sqrt(within-cluster sum of squared distances to the
// cluster mean). The square root penalizes splitting a cluster into parts
// with the same mean.
double cv_loss(const Eigen::MatrixXd& data, const std::vector<int>& labels);

}  // namespace pcrp
