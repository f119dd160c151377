#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace kpcr {

/// Relative misclassification costs. cost_fp is the cost of forecasting
/// positive for an actual negative; cost_fn the reverse.
struct CostPair {
  double cost_fp = 1.0;
  double cost_fn = 1.0;

  void validate() const;
  /// Desired FN/FP count ratio on forecasts: cost_fp / cost_fn.
  double target_ratio() const { return cost_fp / cost_fn; }
};

/// Case weights carrying the costs into a logistic fit: actual negatives get
/// cost_fp, actual positives cost_fn, then one global rescale so the mean is
/// exactly 1 (effective sample size unchanged).
Eigen::VectorXd cost_weights(const Eigen::VectorXd& y, const CostPair& costs);

/// Threshold carrying the costs into an unweighted fit:
/// t = cost_fp / (cost_fp + cost_fn); forecast positive iff probability > t.
double threshold_from_costs(const CostPair& costs);

enum class Link { logit, identity };

struct GlmFit {
  Link link = Link::logit;
  Eigen::VectorXd coefficients;  // intercept first, then one slope per column
  int iterations = 0;
  double gradient_norm = 0.0;  // max-abs of the (weighted) score equations
  bool converged = true;
  bool separated = false;  // complete/quasi-separation heuristic tripped
  Eigen::VectorXd weights;

  Eigen::Index rank() const { return coefficients.size() - 1; }
};

/// Weighted logistic regression by iteratively reweighted least squares.
/// Converged when the relative deviance change drops below 1e-10, capped at
/// 100 iterations. Separation (any |coefficient| > 30 on standardized inputs,
/// or a fitted probability within 1e-10 of 0 or 1) is flagged, not fatal.
GlmFit fit_weighted_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& weights);
GlmFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Ordinary least squares for numeric responses.
GlmFit fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

double linear_predictor(const GlmFit& fit, const Eigen::RowVectorXd& scores);

/// Fitted values for each row: probabilities under logit, plain predictions
/// under identity.
Eigen::VectorXd fitted_values(const GlmFit& fit, const Eigen::MatrixXd& X);

/// Weighted binomial log-likelihood of the fit on (X, y).
double log_likelihood(const GlmFit& fit, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct Prediction {
  double probability = 0.0;
  int label = 0;
};

/// Probability via the inverse link; label 1 iff probability > threshold
/// (the boundary itself forecasts negative).
Prediction predict_and_classify(const GlmFit& fit, const Eigen::RowVectorXd& scores,
                                double threshold);

std::vector<int> classify(const Eigen::VectorXd& probabilities, double threshold);

struct ConfusionReport {
  long tn = 0, fp = 0, fn = 0, tp = 0;
  double error_negative = 0.0;  // FP / (TN + FP), the actual-negative row
  double error_positive = 0.0;  // FN / (FN + TP), the actual-positive row
  double fn_fp_ratio = 0.0;     // NaN when FP == 0
  double cost_weighted_error = 0.0;  // cost_fp * FP + cost_fn * FN
  CostPair costs;

  long total() const { return tn + fp + fn + tp; }
};

ConfusionReport confusion_report(const std::vector<int>& predicted,
                                 const std::vector<int>& actual, const CostPair& costs);

}  // namespace kpcr
