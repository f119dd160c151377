#include "kpcr/glm.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "kpcr/dataset.hpp"
#include "kpcr/errors.hpp"

namespace kpcr {

namespace {

constexpr double kDevianceRelTol = 1e-10;
constexpr int kMaxIrlsIterations = 100;
constexpr double kSeparationCoef = 30.0;
constexpr double kSeparationProb = 1e-10;
constexpr double kProbFloor = 1e-15;

double logistic(double eta) {
  if (eta >= 0.0) {
    return 1.0 / (1.0 + std::exp(-eta));
  }
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd design(X.rows(), X.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(X.cols()) = X;
  return design;
}

double weighted_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& w) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double pi = std::clamp(p[i], kProbFloor, 1.0 - kProbFloor);
    total += w[i] * (y[i] * std::log(pi) + (1.0 - y[i]) * std::log(1.0 - pi));
  }
  return -2.0 * total;
}

void check_design(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) throw ValidationError("design and response lengths differ");
  if (!X.allFinite() || !y.allFinite()) throw ValidationError("non-finite design or response");
  if (X.cols() >= X.rows()) {
    throw ValidationError("ill-posed fit: " + std::to_string(X.cols()) + " regressors for " +
                          std::to_string(X.rows()) + " cases (need r < N)");
  }
}

}  // namespace

void CostPair::validate() const {
  if (!(cost_fp > 0.0) || !(cost_fn > 0.0) || !std::isfinite(cost_fp) ||
      !std::isfinite(cost_fn)) {
    throw ValidationError("costs must be strictly positive finite numbers");
  }
}

Eigen::VectorXd cost_weights(const Eigen::VectorXd& y, const CostPair& costs) {
  costs.validate();
  if (!is_binary_response(y)) {
    throw ValidationError("cost weights require a 0/1 response with both classes present");
  }
  Eigen::VectorXd w(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    // Misclassifying an actual negative makes a false positive, so actual
    // negatives carry cost_fp, actual positives cost_fn.
    w[i] = y[i] == 1.0 ? costs.cost_fn : costs.cost_fp;
  }
  w /= w.mean();  // effective sample size unchanged
  return w;
}

double threshold_from_costs(const CostPair& costs) {
  costs.validate();
  return costs.cost_fp / (costs.cost_fp + costs.cost_fn);
}

GlmFit fit_weighted_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& weights) {
  check_design(X, y);
  if (weights.size() != y.size()) throw ValidationError("weight vector length mismatch");
  if ((weights.array() <= 0.0).any()) throw ValidationError("weights must be positive");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      throw ValidationError("logistic regression needs a 0/1 response");
    }
  }

  const Eigen::MatrixXd design = with_intercept(X);
  const Eigen::Index n = design.rows();
  const Eigen::Index m = design.cols();

  GlmFit fit;
  fit.link = Link::logit;
  fit.weights = weights;
  fit.coefficients = Eigen::VectorXd::Zero(m);

  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p[i] = logistic(eta[i]);
  double deviance = weighted_deviance(y, p, weights);

  bool converged = false;
  int iter = 0;
  while (iter < kMaxIrlsIterations) {
    ++iter;
    // Weighted least squares on the working response.
    Eigen::VectorXd irls_w(n);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double variance = std::max(p[i] * (1.0 - p[i]), 1e-10);
      irls_w[i] = weights[i] * variance;
      z[i] = eta[i] + (y[i] - p[i]) / variance;
    }
    const Eigen::MatrixXd weighted = irls_w.asDiagonal() * design;
    const Eigen::MatrixXd normal = design.transpose() * weighted;
    const Eigen::VectorXd rhs = design.transpose() * (irls_w.asDiagonal() * z);
    Eigen::LDLT<Eigen::MatrixXd> solver(normal);
    if (solver.info() != Eigen::Success) {
      throw NumericError("IRLS normal equations are singular");
    }
    const Eigen::VectorXd next = solver.solve(rhs);
    if (!next.allFinite()) throw NumericError("IRLS produced non-finite coefficients");

    fit.coefficients = next;
    eta = design * fit.coefficients;
    for (Eigen::Index i = 0; i < n; ++i) p[i] = logistic(eta[i]);
    const double next_deviance = weighted_deviance(y, p, weights);
    const double rel = std::abs(next_deviance - deviance) / std::max(std::abs(deviance), 1e-10);
    deviance = next_deviance;
    if (rel < kDevianceRelTol) {
      converged = true;
      break;
    }
  }

  fit.iterations = iter;
  fit.converged = converged;
  const Eigen::VectorXd score = design.transpose() * (weights.array() * (y - p).array()).matrix();
  fit.gradient_norm = score.cwiseAbs().maxCoeff();
  fit.separated = fit.coefficients.cwiseAbs().maxCoeff() > kSeparationCoef ||
                  (p.array() <= kSeparationProb).any() ||
                  (p.array() >= 1.0 - kSeparationProb).any();
  return fit;
}

GlmFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  return fit_weighted_logistic(X, y, Eigen::VectorXd::Ones(y.size()));
}

GlmFit fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  check_design(X, y);
  const Eigen::MatrixXd design = with_intercept(X);
  GlmFit fit;
  fit.link = Link::identity;
  fit.weights = Eigen::VectorXd::Ones(y.size());
  fit.coefficients = design.colPivHouseholderQr().solve(y);
  if (!fit.coefficients.allFinite()) throw NumericError("least squares produced non-finite fit");
  fit.iterations = 1;
  fit.converged = true;
  const Eigen::VectorXd residuals = y - design * fit.coefficients;
  fit.gradient_norm = (design.transpose() * residuals).cwiseAbs().maxCoeff();
  return fit;
}

double linear_predictor(const GlmFit& fit, const Eigen::RowVectorXd& scores) {
  if (scores.size() != fit.rank()) {
    throw ValidationError("score vector has " + std::to_string(scores.size()) +
                          " components, fit expects " + std::to_string(fit.rank()));
  }
  return fit.coefficients[0] + scores * fit.coefficients.tail(fit.rank());
}

Eigen::VectorXd fitted_values(const GlmFit& fit, const Eigen::MatrixXd& X) {
  if (X.cols() != fit.rank()) throw ValidationError("design width does not match the fit");
  Eigen::VectorXd eta =
      (X * fit.coefficients.tail(fit.rank())).array() + fit.coefficients[0];
  if (fit.link == Link::identity) return eta;
  for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = logistic(eta[i]);
  return eta;
}

double log_likelihood(const GlmFit& fit, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (fit.link != Link::logit) throw ValidationError("log-likelihood defined for logit fits");
  const Eigen::VectorXd p = fitted_values(fit, X);
  // Loaded models carry no weight vector; treat that as unit weights.
  const bool weighted = fit.weights.size() == y.size();
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double pi = std::clamp(p[i], kProbFloor, 1.0 - kProbFloor);
    total += (weighted ? fit.weights[i] : 1.0) *
             (y[i] * std::log(pi) + (1.0 - y[i]) * std::log(1.0 - pi));
  }
  return total;
}

Prediction predict_and_classify(const GlmFit& fit, const Eigen::RowVectorXd& scores,
                                double threshold) {
  const double eta = linear_predictor(fit, scores);
  Prediction out;
  out.probability = fit.link == Link::logit ? logistic(eta) : eta;
  // Boundary forecasts negative: strictly greater than the threshold.
  out.label = out.probability > threshold ? 1 : 0;
  return out;
}

std::vector<int> classify(const Eigen::VectorXd& probabilities, double threshold) {
  std::vector<int> labels(static_cast<std::size_t>(probabilities.size()));
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    labels[static_cast<std::size_t>(i)] = probabilities[i] > threshold ? 1 : 0;
  }
  return labels;
}

ConfusionReport confusion_report(const std::vector<int>& predicted,
                                 const std::vector<int>& actual, const CostPair& costs) {
  costs.validate();
  if (predicted.size() != actual.size()) {
    throw ValidationError("predicted and actual label vectors differ in length");
  }
  ConfusionReport report;
  report.costs = costs;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (actual[i] == 1) {
      predicted[i] == 1 ? ++report.tp : ++report.fn;
    } else {
      predicted[i] == 1 ? ++report.fp : ++report.tn;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const long neg = report.tn + report.fp;
  const long pos = report.fn + report.tp;
  report.error_negative = neg > 0 ? static_cast<double>(report.fp) / neg : nan;
  report.error_positive = pos > 0 ? static_cast<double>(report.fn) / pos : nan;
  report.fn_fp_ratio =
      report.fp > 0 ? static_cast<double>(report.fn) / report.fp : nan;
  report.cost_weighted_error = costs.cost_fp * report.fp + costs.cost_fn * report.fn;
  return report;
}

}  // namespace kpcr
