#include "kpcr/kpca.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kpcr/csv.hpp"
#include "kpcr/errors.hpp"

namespace kpcr {

KpcBasis eigendecompose(const CenteredKernel& ck) {
  const Eigen::MatrixXd& K = ck.values;
  const Eigen::Index n = K.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(K);
  if (solver.info() != Eigen::Success) {
    throw NumericError("symmetric eigendecomposition failed to converge");
  }

  // Solver returns ascending order; flip to descending.
  KpcBasis basis;
  basis.eigenvalues.resize(n);
  basis.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    basis.eigenvalues[k] = solver.eigenvalues()[n - 1 - k];
    basis.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }

  // Reject anything below -1e-8 * lambda_1 as non-PSD; the extra absolute
  // term only matters for degenerate inputs whose whole spectrum is rounding
  // dust (e.g. the centered constant matrix). Tiny positive eigenvalues are
  // rank-deficiency noise (double centering always kills one dimension) and
  // are clamped to zero as well, so they can never be projected onto.
  const double lead = std::max(basis.eigenvalues[0], 0.0);
  const double dust = 1e-14 * std::max(1.0, K.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < n; ++k) {
    double& value = basis.eigenvalues[k];
    if (value < -(1e-8 * lead + dust)) {
      throw NumericError("centered kernel has eigenvalue " + format_double(value) +
                         " below -1e-8 * lambda_1; input is not positive semidefinite");
    }
    if (value < 1e-12 * lead + dust) value = 0.0;
  }

  // Fix each eigenvector's sign: largest-magnitude entry positive, ties to
  // the lowest index.
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index arg = 0;
    double best = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mag = std::abs(basis.eigenvectors(i, k));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (basis.eigenvectors(arg, k) < 0.0) basis.eigenvectors.col(k) *= -1.0;
  }

  const double total = basis.eigenvalues.sum();
  basis.shares.resize(n);
  basis.cumulative.resize(n);
  double running = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    basis.shares[k] = total > 0.0 ? basis.eigenvalues[k] / total : 0.0;
    running += basis.shares[k];
    basis.cumulative[k] = running;
  }
  basis.positive_count = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (basis.eigenvalues[k] > 0.0) ++basis.positive_count;
  }
  return basis;
}

int select_rank(const KpcBasis& basis, double rho) {
  if (!(rho > 0.0) || rho > 1.0) throw ValidationError("rho must be in (0, 1]");
  if (basis.positive_count == 0) {
    throw ValidationError("all eigenvalues are zero; no components to select");
  }
  for (int r = 1; r <= basis.positive_count; ++r) {
    if (basis.cumulative[r - 1] >= rho - 1e-12) return r;
  }
  return basis.positive_count;
}

PcRegressors project_training(const CenteredKernel& ck, const KpcBasis& basis, int r) {
  if (r < 1 || r > basis.positive_count) {
    throw ValidationError("rank " + std::to_string(r) + " outside 1.." +
                          std::to_string(basis.positive_count) +
                          " (positive eigenvalues only)");
  }
  // K_tilde U Lambda^{-1/2}; column k comes out as sqrt(lambda_k) u_k.
  PcRegressors out;
  out.rank = r;
  out.scores = ck.values * basis.eigenvectors.leftCols(r) *
               basis.eigenvalues.head(r).cwiseSqrt().cwiseInverse().asDiagonal();
  return out;
}

Eigen::RowVectorXd project_new(const Eigen::VectorXd& centered_row, const KpcBasis& basis,
                               int r) {
  if (r < 1 || r > basis.positive_count) {
    throw ValidationError("rank outside the positive-eigenvalue range");
  }
  if (centered_row.size() != basis.eigenvectors.rows()) {
    throw ValidationError("kernel row length does not match the basis");
  }
  return centered_row.transpose() * basis.eigenvectors.leftCols(r) *
         basis.eigenvalues.head(r).cwiseSqrt().cwiseInverse().asDiagonal();
}

void write_spectrum_csv(const std::string& path, const KpcBasis& basis) {
  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index k = 0; k < basis.eigenvalues.size(); ++k) {
    rows.push_back({std::to_string(k + 1), format_double(basis.eigenvalues[k]),
                    format_double(basis.shares[k]), format_double(basis.cumulative[k])});
  }
  write_csv_atomic(path, {"k", "eigenvalue", "share", "cumulative"}, rows);
}

}  // namespace kpcr
