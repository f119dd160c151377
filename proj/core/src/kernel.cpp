#include "kpcr/kernel.hpp"

#include <cmath>
#include <sstream>

#include "kpcr/csv.hpp"
#include "kpcr/errors.hpp"

namespace kpcr {

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "radial" || name == "rbf") return KernelFamily::radial;
  if (name == "anova") return KernelFamily::anova;
  throw ValidationError("unknown kernel family '" + name + "' (expected radial or anova)");
}

std::string to_string(KernelFamily family) {
  return family == KernelFamily::radial ? "radial" : "anova";
}

void KernelSpec::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("kernel gamma must be a positive finite number");
  }
  if (family == KernelFamily::anova && degree < 1) {
    throw ValidationError("anova kernel degree must be a positive integer");
  }
}

std::string KernelSpec::name() const {
  std::ostringstream out;
  out << to_string(family) << "(gamma=" << format_double(gamma);
  if (family == KernelFamily::anova) out << ", d=" << degree;
  out << ")";
  return out.str();
}

double kernel_value(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                    const KernelSpec& spec) {
  spec.validate();
  if (x.size() != x_prime.size() || x.size() < 1) {
    throw ValidationError("kernel arguments must be same-length vectors of length >= 1");
  }
  if (!x.allFinite() || !x_prime.allFinite()) {
    throw ValidationError("kernel arguments must be finite");
  }
  switch (spec.family) {
    case KernelFamily::radial:
      return std::exp(-spec.gamma * (x - x_prime).squaredNorm());
    case KernelFamily::anova: {
      // Per-coordinate squared differences, scaled, exponentiated, summed,
      // then the sum raised to the degree.
      const double sum = (-spec.gamma * (x - x_prime).array().square()).exp().sum();
      double power = 1.0;
      for (int k = 0; k < spec.degree; ++k) power *= sum;
      return power;
    }
  }
  throw NumericError("unreachable kernel family");
}

KernelMatrix build_kernel_matrix(const Eigen::MatrixXd& X, const KernelSpec& spec) {
  spec.validate();
  if (X.rows() < 2) throw ValidationError("kernel matrix needs at least 2 observations");
  if (!X.allFinite()) throw ValidationError("predictor matrix contains non-finite values");

  const Eigen::Index n = X.rows();
  KernelMatrix out;
  out.spec = spec;
  out.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double value = kernel_value(X.row(i), X.row(j), spec);
      out.values(i, j) = value;
      out.values(j, i) = value;
    }
  }
  return out;
}

CenteredKernel center_kernel_matrix(const KernelMatrix& kernel) {
  const Eigen::MatrixXd& K = kernel.values;
  const Eigen::Index n = K.rows();
  if (K.cols() != n) throw ValidationError("kernel matrix must be square");
  const double asym = (K - K.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, K.cwiseAbs().maxCoeff())) {
    throw NumericError("kernel matrix is not symmetric (max asymmetry " + format_double(asym) +
                       ")");
  }

  CenteredKernel out;
  out.stats.column_means = K.colwise().mean();
  out.stats.grand_mean = K.mean();
  // K - JK/N - KJ/N + JKJ/N^2, expressed through the column means.
  out.values = K;
  out.values.rowwise() -= out.stats.column_means.transpose();
  out.values.colwise() -= out.stats.column_means;
  out.values.array() += out.stats.grand_mean;
  return out;
}

Eigen::VectorXd new_point_kernel_row(const Eigen::VectorXd& x_star,
                                     const Eigen::MatrixXd& X_train, const KernelSpec& spec,
                                     const KernelCenteringStats& stats) {
  if (x_star.size() != X_train.cols()) {
    throw ValidationError("new case has " + std::to_string(x_star.size()) +
                          " features, training data has " + std::to_string(X_train.cols()));
  }
  if (X_train.rows() != stats.column_means.size()) {
    throw ValidationError("centering statistics do not match the training matrix");
  }
  const Eigen::Index n = X_train.rows();
  Eigen::VectorXd row(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    row[j] = kernel_value(x_star, X_train.row(j), spec);
  }
  // The unique centering under which a training row reproduces its row of
  // K_tilde: subtract the row's own mean and the training column means, add
  // back the training grand mean.
  const double row_mean = row.mean();
  row.array() -= row_mean;
  row -= stats.column_means;
  row.array() += stats.grand_mean;
  return row;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& values) {
  std::vector<std::string> header;
  header.reserve(static_cast<std::size_t>(values.cols()));
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    header.push_back("c" + std::to_string(j));
  }
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<std::size_t>(values.rows()));
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    std::vector<std::string> row;
    row.reserve(static_cast<std::size_t>(values.cols()));
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      row.push_back(format_double(values(i, j)));
    }
    rows.push_back(std::move(row));
  }
  write_csv_atomic(path, header, rows);
}

}  // namespace kpcr
