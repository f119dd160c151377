#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

#include "kpcr/dataset.hpp"
#include "kpcr/glm.hpp"
#include "kpcr/kernel.hpp"
#include "kpcr/kpca.hpp"

namespace kpcr {

/// Everything needed to score a new case. Prediction has to recapitulate the
/// whole training transform (standardize, kernel row against the retained
/// training matrix, center, project, apply the GLM), so the training
/// predictors travel with the model.
struct FittedForecaster {
  StandardizationParams standardization;
  KernelSpec kernel;
  Eigen::MatrixXd training_matrix;  // standardized training predictors, N x p
  KernelCenteringStats centering;
  Eigen::VectorXd eigenvalues;   // leading r eigenvalues of K_tilde
  Eigen::MatrixXd basis;         // N x r eigenvector block
  GlmFit glm;
  CostPair costs;
  double threshold = 0.5;

  struct Provenance {
    std::uint64_t seed = 0;
    std::string grid;   // short description of the search that produced this
    std::string audit;  // pointer to the selection audit artifact, if any
  } provenance;

  int rank() const { return static_cast<int>(basis.cols()); }

  /// Scores of one case already standardized with the training parameters.
  Eigen::RowVectorXd component_scores(const Eigen::VectorXd& standardized_case) const;

  Prediction score_standardized(const Eigen::VectorXd& standardized_case) const;

  /// Standardizes with the stored parameters, then scores. The case vector
  /// must match the pre-standardization feature schema (names and order).
  Prediction score_raw(const Eigen::VectorXd& raw_case,
                       const std::vector<std::string>& feature_names) const;

  void validate() const;
};

/// Fit one forecaster end to end on standardized training data: kernel,
/// centering, eigendecomposition, rank by rho, then a cost-weighted logistic
/// fit (0/1 response, threshold fixed at 0.5 because the weights carry the
/// costs) or an OLS fit (numeric response).
FittedForecaster fit_forecaster(const Dataset& train_z, const StandardizationParams& params,
                                const KernelSpec& kernel, double rho, const CostPair& costs);

}  // namespace kpcr
