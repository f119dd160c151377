#pragma once

#include <string>
#include <vector>

#include "kpcr/dataset.hpp"
#include "kpcr/glm.hpp"

namespace kpcr {

/// Record of a backward elimination by AIC. AIC strictly decreases along the
/// recorded removals.
struct StepwisePath {
  double initial_aic = 0.0;
  struct Step {
    int column = -1;
    std::string removed;
    double aic_after = 0.0;
  };
  std::vector<Step> steps;
  std::vector<int> final_columns;  // ascending
  std::vector<std::string> final_predictors;
  double final_aic = 0.0;
  bool intercept_only = false;
  // Columns dropped up front because the full model would not converge.
  std::vector<std::string> forced_drops;
};

/// Backward elimination from the full unweighted logistic model.
/// AIC = -2 loglik + 2 (predictors + 1); at each step the single removal with
/// the lowest AIC is taken if it improves on the current AIC (ties to the
/// lowest column index).
StepwisePath backward_eliminate_aic(const Dataset& train);

void write_stepwise_csv(const std::string& path, const StepwisePath& path_record);

struct BaselineModel {
  std::vector<int> columns;
  std::vector<std::string> predictors;
  GlmFit fit;  // re-estimated on validation data, unweighted
  CostPair costs;
  double threshold = 0.5;  // threshold_from_costs(costs)
  std::vector<std::string> dropped_constant;  // constant within validation
};

struct BaselineEvaluation {
  BaselineModel model;
  ConfusionReport test_report;
  Eigen::VectorXd test_fitted;  // probabilities on the test split
};

/// The comparator protocol: refit the selected predictors on the validation
/// split by unweighted maximum likelihood, then classify the test split with
/// the cost-derived threshold.
BaselineEvaluation fit_and_evaluate_baseline(const StepwisePath& path, const Dataset& validation,
                                             const Dataset& test, const CostPair& costs);

}  // namespace kpcr
