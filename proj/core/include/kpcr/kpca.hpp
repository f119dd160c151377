#pragma once

#include <Eigen/Core>

#include <string>

#include "kpcr/kernel.hpp"

namespace kpcr {

/// Spectrum of the centered kernel. Eigenvalues descend; values in
/// [-1e-8*lambda_1, 0) are clamped to zero, anything lower is rejected as a
/// non-PSD input. Each eigenvector's largest-magnitude entry is positive
/// (ties broken by lowest index) so decompositions are reproducible.
struct KpcBasis {
  Eigen::VectorXd eigenvalues;   // descending, >= 0
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, matching order
  Eigen::VectorXd shares;        // lambda_k / sum(lambda)
  Eigen::VectorXd cumulative;    // running sum of shares, ends at 1
  int positive_count = 0;        // eigenvalues strictly > 0
};

KpcBasis eigendecompose(const CenteredKernel& ck);

/// Smallest r whose cumulative variance share reaches rho; never includes
/// zero-eigenvalue components.
int select_rank(const KpcBasis& basis, double rho);

/// Component scores for the training rows: X' = K_tilde U_{1..r} Lambda^{-1/2},
/// i.e. column k equals sqrt(lambda_k) u_k.
struct PcRegressors {
  Eigen::MatrixXd scores;  // N x r
  int rank = 0;
};

PcRegressors project_training(const CenteredKernel& ck, const KpcBasis& basis, int r);

/// Scores for a centered new-case kernel row, same scaling as training.
Eigen::RowVectorXd project_new(const Eigen::VectorXd& centered_row, const KpcBasis& basis,
                               int r);

/// CSV of (k, eigenvalue, share, cumulative) for scree-style inspection.
void write_spectrum_csv(const std::string& path, const KpcBasis& basis);

}  // namespace kpcr
