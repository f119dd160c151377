#pragma once

#include <string>
#include <vector>

#include "kpcr/glm.hpp"
#include "kpcr/selection.hpp"
#include "kpcr/stepwise.hpp"

namespace kpcr {

/// Aligned text confusion table:
///                    Predict <neg>   Predict <pos>   Model Error
///   Actual <neg>           TN              FP            e0
///   Actual <pos>           FN              TP            e1
/// plus FN/FP ratio and cost-weighted error lines.
std::string confusion_text(const ConfusionReport& report, const std::string& negative_label = "0",
                           const std::string& positive_label = "1");

std::string confusion_json(const ConfusionReport& report);

/// Quartile summary of fitted values (dispersion is what the comparison cares
/// about, so q1/median/q3/IQR are first-class).
struct FittedSummary {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  double iqr() const { return q3 - q1; }
};

FittedSummary summarize_fitted(const Eigen::VectorXd& fitted);

void write_fitted_csv(const std::string& path, const Eigen::VectorXd& fitted);

std::string audit_json(const std::vector<CandidateResult>& candidates,
                       const SelectionAudit& audit);

struct ComparisonReport {
  ConfusionReport kpclr;
  ConfusionReport baseline;
  FittedSummary kpclr_fitted;
  FittedSummary baseline_fitted;
  std::string kpclr_model;  // winner description
  std::vector<std::string> baseline_predictors;
};

std::string comparison_text(const ComparisonReport& report);
std::string comparison_json(const ComparisonReport& report);

/// Render a machine-readable report file (confusion / comparison JSON as
/// written by the CLI) back into the aligned text form.
std::string render_report_json(const std::string& json_text);

}  // namespace kpcr
