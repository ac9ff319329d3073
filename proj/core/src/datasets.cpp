#include "pcrp/datasets.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pcrp/rng.hpp"

namespace pcrp {

void MixtureSpec::validate() const {
  const int k = components();
  if (k < 1) throw std::invalid_argument("MixtureSpec: need at least one component");
  if (static_cast<int>(means.size()) != k || static_cast<int>(covariances.size()) != k)
    throw std::invalid_argument("MixtureSpec: component counts inconsistent");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      throw std::invalid_argument("MixtureSpec: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("MixtureSpec: weights must sum to 1");
  const int d = dim();
  for (int c = 0; c < k; ++c) {
    if (means[c].size() != d || covariances[c].rows() != d || covariances[c].cols() != d)
      throw std::invalid_argument("MixtureSpec: dimension mismatch");
    if ((covariances[c] - covariances[c].transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("MixtureSpec: covariance must be symmetric");
    if (Eigen::LLT<Eigen::MatrixXd>(covariances[c]).info() != Eigen::Success)
      throw std::invalid_argument("MixtureSpec: covariance must be positive definite");
  }
}

Dataset generate(const MixtureSpec& spec, int n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  const int d = spec.dim();
  const int k = spec.components();
  std::vector<Eigen::MatrixXd> chol(k);
  for (int c = 0; c < k; ++c) {
    chol[c] = Eigen::LLT<Eigen::MatrixXd>(spec.covariances[c]).matrixL();
  }
  Rng rng(seed);
  Dataset out;
  out.x.resize(n, d);
  out.labels = std::vector<int>(n);
  Eigen::VectorXd z(d);
  for (int i = 0; i < n; ++i) {
    const int c = rng.categorical(spec.weights);
    for (int j = 0; j < d; ++j) z[j] = rng.normal();
    out.x.row(i) = (spec.means[c] + chol[c] * z).transpose();
    (*out.labels)[i] = c;
  }
  return out;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Eigen::MatrixXd Standardizer::invert(const Eigen::MatrixXd& z) const {
  return (z.array().rowwise() * scale.transpose().array()).matrix().rowwise() +
         mean.transpose();
}

std::pair<Dataset, Standardizer> standardize(const Dataset& data) {
  const int n = data.n();
  if (n < 2) throw std::invalid_argument("standardize: need at least 2 rows");
  Standardizer tf;
  tf.mean = data.x.colwise().mean();
  Eigen::MatrixXd centered = data.x.rowwise() - tf.mean.transpose();
  tf.scale = (centered.array().square().colwise().sum() / (n - 1)).sqrt();
  for (int j = 0; j < tf.scale.size(); ++j) {
    if (tf.scale[j] <= 0.0)
      throw std::invalid_argument("standardize: dimension " + std::to_string(j + 1) +
                                  " has zero variance");
  }
  Dataset out = data;
  out.x = tf.apply(data.x);
  return {out, tf};
}

namespace {

[[noreturn]] void csv_error(const std::string& path, int line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) csv_error(path, 1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);
  bool has_label = !header.empty() && header.back() == "label";
  const int d = static_cast<int>(header.size()) - (has_label ? 1 : 0);
  if (d < 1) csv_error(path, 1, "no feature columns");
  for (int j = 0; j < d; ++j) {
    if (header[j] != "x" + std::to_string(j + 1))
      csv_error(path, 1, "expected feature column x" + std::to_string(j + 1) + ", got '" +
                             header[j] + "'");
  }

  std::vector<double> values;
  std::vector<int> labels;
  int rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (static_cast<int>(fields.size()) != d + (has_label ? 1 : 0))
      csv_error(path, line_no, "ragged row: expected " +
                                   std::to_string(d + (has_label ? 1 : 0)) + " fields, got " +
                                   std::to_string(fields.size()));
    for (int j = 0; j < d; ++j) {
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(fields[j], &pos);
      } catch (const std::exception&) {
        csv_error(path, line_no, "nonnumeric cell '" + fields[j] + "'");
      }
      if (pos != fields[j].size()) csv_error(path, line_no, "nonnumeric cell '" + fields[j] + "'");
      values.push_back(v);
    }
    if (has_label) {
      std::size_t pos = 0;
      int v = 0;
      try {
        v = std::stoi(fields[d], &pos);
      } catch (const std::exception&) {
        csv_error(path, line_no, "nonnumeric label '" + fields[d] + "'");
      }
      if (pos != fields[d].size()) csv_error(path, line_no, "nonnumeric label '" + fields[d] + "'");
      labels.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) csv_error(path, line_no, "no data rows");

  Dataset out;
  out.x.resize(rows, d);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < d; ++j) out.x(i, j) = values[static_cast<std::size_t>(i) * d + j];
  }
  if (has_label) out.labels = std::move(labels);
  out.name = path;
  return out;
}

void write_csv(const Dataset& data, const std::string& path) {
  if (data.labels && static_cast<int>(data.labels->size()) != data.n())
    throw std::invalid_argument("write_csv: label length mismatch");
  std::ofstream out(path, std::ios::binary);  // '\n' endings everywhere
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  const int d = data.dim();
  for (int j = 0; j < d; ++j) out << (j ? ",x" : "x") << (j + 1);
  if (data.labels) out << ",label";
  out << '\n';
  char buf[40];
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.x(i, j));
      if (j) out << ',';
      out << buf;
    }
    if (data.labels) out << ',' << (*data.labels)[i];
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

MixtureSpec sim1_spec() {
  MixtureSpec s;
  s.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  // Separation calibrated so the all-in-one collapse raises the cross-validation
  // loss by a clear factor (>1.5x) over the three-cluster solution.
  s.means = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(5.0, 0.0), Eigen::Vector2d(2.5, 3.75)};
  const Eigen::Matrix2d cov = 0.5 * Eigen::Matrix2d::Identity();
  s.covariances = {cov, cov, cov};
  return s;
}

MixtureSpec sim2_spec() {
  MixtureSpec s;
  s.weights = {0.5, 0.5};
  s.means = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(0.0, 0.0)};
  s.covariances = {Eigen::Matrix2d::Identity(), 16.0 * Eigen::Matrix2d::Identity()};
  return s;
}

}  // namespace pcrp
