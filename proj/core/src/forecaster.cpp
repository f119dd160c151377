#include "kpcr/forecaster.hpp"

#include <algorithm>

#include "kpcr/errors.hpp"

namespace kpcr {

Eigen::RowVectorXd FittedForecaster::component_scores(
    const Eigen::VectorXd& standardized_case) const {
  const Eigen::VectorXd row =
      new_point_kernel_row(standardized_case, training_matrix, kernel, centering);
  return row.transpose() * basis * eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal();
}

Prediction FittedForecaster::score_standardized(const Eigen::VectorXd& standardized_case) const {
  return predict_and_classify(glm, component_scores(standardized_case), threshold);
}

Prediction FittedForecaster::score_raw(const Eigen::VectorXd& raw_case,
                                       const std::vector<std::string>& feature_names) const {
  if (raw_case.size() != static_cast<Eigen::Index>(feature_names.size())) {
    throw ValidationError("case vector and feature name list differ in length");
  }
  Eigen::VectorXd z(standardization.mean.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const auto& wanted = standardization.columns[static_cast<std::size_t>(j)];
    auto it = std::find(feature_names.begin(), feature_names.end(), wanted);
    if (it == feature_names.end()) {
      throw ValidationError("case lacks feature '" + wanted + "' required by the model");
    }
    const auto src = static_cast<Eigen::Index>(it - feature_names.begin());
    z[j] = (raw_case[src] - standardization.mean[j]) / standardization.sd[j];
  }
  return score_standardized(z);
}

void FittedForecaster::validate() const {
  kernel.validate();
  costs.validate();
  const Eigen::Index n = training_matrix.rows();
  const Eigen::Index r = basis.cols();
  if (n < 2) throw ValidationError("forecaster holds fewer than 2 training rows");
  if (training_matrix.cols() != standardization.mean.size()) {
    throw ValidationError("training matrix width does not match standardization parameters");
  }
  if (centering.column_means.size() != n) {
    throw ValidationError("centering statistics do not match the training matrix");
  }
  if (basis.rows() != n || eigenvalues.size() != r || r < 1) {
    throw ValidationError("basis block is inconsistent with the training matrix");
  }
  if ((eigenvalues.array() <= 0.0).any()) {
    throw ValidationError("retained eigenvalues must be strictly positive");
  }
  if (glm.coefficients.size() != r + 1) {
    throw ValidationError("GLM coefficient count does not match the basis rank");
  }
  if (!(threshold > 0.0) || !(threshold < 1.0)) {
    throw ValidationError("classification threshold must lie in (0, 1)");
  }
}

FittedForecaster fit_forecaster(const Dataset& train_z, const StandardizationParams& params,
                                const KernelSpec& kernel, double rho, const CostPair& costs) {
  const KernelMatrix K = build_kernel_matrix(train_z.X, kernel);
  const CenteredKernel ck = center_kernel_matrix(K);
  const KpcBasis basis = eigendecompose(ck);
  const int r = select_rank(basis, rho);
  const PcRegressors scores = project_training(ck, basis, r);

  FittedForecaster f;
  f.standardization = params;
  f.kernel = kernel;
  f.training_matrix = train_z.X;
  f.centering = ck.stats;
  f.eigenvalues = basis.eigenvalues.head(r);
  f.basis = basis.eigenvectors.leftCols(r);
  f.costs = costs;
  if (is_binary_response(train_z.y)) {
    const Eigen::VectorXd w = cost_weights(train_z.y, costs);
    f.glm = fit_weighted_logistic(scores.scores, train_z.y, w);
    f.threshold = 0.5;  // the weights carry the costs
  } else {
    f.glm = fit_linear(scores.scores, train_z.y);
    f.threshold = 0.5;
  }
  return f;
}

}  // namespace kpcr
