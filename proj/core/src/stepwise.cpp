#include "kpcr/stepwise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kpcr/csv.hpp"
#include "kpcr/errors.hpp"

namespace kpcr {

namespace {

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, const std::vector<int>& columns) {
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = X.col(columns[j]);
  }
  return out;
}

struct ScoredFit {
  GlmFit fit;
  double aic = 0.0;
};

ScoredFit fit_subset(const Dataset& ds, const std::vector<int>& columns) {
  const Eigen::MatrixXd X = select_columns(ds.X, columns);
  ScoredFit scored;
  scored.fit = fit_logistic(X, ds.y);
  const double loglik = log_likelihood(scored.fit, X, ds.y);
  scored.aic = -2.0 * loglik + 2.0 * (static_cast<double>(columns.size()) + 1.0);
  return scored;
}

}  // namespace

StepwisePath backward_eliminate_aic(const Dataset& train) {
  if (!is_binary_response(train.y)) {
    throw ValidationError("backward elimination needs a 0/1 response with both classes");
  }
  if (train.n() <= train.p() + 1) {
    throw ValidationError("backward elimination needs N > p + 1 on the training split");
  }

  StepwisePath path;
  std::vector<int> columns(static_cast<std::size_t>(train.p()));
  for (std::size_t j = 0; j < columns.size(); ++j) columns[j] = static_cast<int>(j);

  // Full model first. If it will not converge (typically separation), drop the
  // column with the largest coefficient until it does, and flag the drops.
  ScoredFit current = fit_subset(train, columns);
  while (!current.fit.converged && !columns.empty()) {
    Eigen::Index worst = 0;
    current.fit.coefficients.tail(current.fit.rank()).cwiseAbs().maxCoeff(&worst);
    const int column = columns[static_cast<std::size_t>(worst)];
    path.forced_drops.push_back(train.feature_names[static_cast<std::size_t>(column)]);
    columns.erase(columns.begin() + static_cast<std::ptrdiff_t>(worst));
    current = fit_subset(train, columns);
  }
  path.initial_aic = current.aic;

  while (!columns.empty()) {
    double best_aic = std::numeric_limits<double>::infinity();
    std::size_t best_position = 0;
    // Ascending column order, strict improvement on the best, so ties land on
    // the lowest column index.
    for (std::size_t j = 0; j < columns.size(); ++j) {
      std::vector<int> reduced = columns;
      reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(j));
      const ScoredFit trial = fit_subset(train, reduced);
      if (trial.aic < best_aic) {
        best_aic = trial.aic;
        best_position = j;
      }
    }
    if (best_aic >= current.aic) break;  // no removal improves
    const int removed = columns[best_position];
    columns.erase(columns.begin() + static_cast<std::ptrdiff_t>(best_position));
    current = fit_subset(train, columns);
    path.steps.push_back(
        {removed, train.feature_names[static_cast<std::size_t>(removed)], current.aic});
  }

  path.final_columns = columns;
  for (int c : columns) {
    path.final_predictors.push_back(train.feature_names[static_cast<std::size_t>(c)]);
  }
  path.final_aic = current.aic;
  path.intercept_only = columns.empty();
  return path;
}

void write_stepwise_csv(const std::string& path, const StepwisePath& record) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"0", "", format_double(record.initial_aic)});
  int step = 1;
  for (const auto& s : record.steps) {
    rows.push_back({std::to_string(step++), s.removed, format_double(s.aic_after)});
  }
  write_csv_atomic(path, {"step", "removed", "aic"}, rows);
}

BaselineEvaluation fit_and_evaluate_baseline(const StepwisePath& path, const Dataset& validation,
                                             const Dataset& test, const CostPair& costs) {
  costs.validate();
  if (!is_binary_response(validation.y)) {
    throw ValidationError("baseline refit needs a 0/1 validation response with both classes");
  }
  if (validation.p() != test.p()) {
    throw ValidationError("validation and test data have different widths");
  }

  BaselineEvaluation eval;
  eval.model.costs = costs;
  eval.model.threshold = threshold_from_costs(costs);

  // Selected predictors, minus any that are constant within validation.
  for (int c : path.final_columns) {
    const double mean = validation.X.col(c).mean();
    const double var = (validation.X.col(c).array() - mean).square().mean();
    if (var > 0.0) {
      eval.model.columns.push_back(c);
      eval.model.predictors.push_back(validation.feature_names[static_cast<std::size_t>(c)]);
    } else {
      eval.model.dropped_constant.push_back(
          validation.feature_names[static_cast<std::size_t>(c)]);
    }
  }

  const Eigen::MatrixXd Xval = select_columns(validation.X, eval.model.columns);
  eval.model.fit = fit_logistic(Xval, validation.y);

  const Eigen::MatrixXd Xtest = select_columns(test.X, eval.model.columns);
  eval.test_fitted = fitted_values(eval.model.fit, Xtest);
  const std::vector<int> predicted = classify(eval.test_fitted, eval.model.threshold);
  std::vector<int> actual(static_cast<std::size_t>(test.n()));
  for (Eigen::Index i = 0; i < test.n(); ++i) {
    actual[static_cast<std::size_t>(i)] = test.y[i] == 1.0 ? 1 : 0;
  }
  eval.test_report = confusion_report(predicted, actual, costs);
  return eval;
}

}  // namespace kpcr
