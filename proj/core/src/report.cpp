#include "kpcr/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "kpcr/csv.hpp"
#include "kpcr/errors.hpp"

namespace kpcr {

namespace {

using nlohmann::json;

std::string two_decimals(double value) {
  if (std::isnan(value)) return "--";
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << value;
  return out.str();
}

json number_or_null(double value) {
  if (std::isnan(value)) return nullptr;
  return value;
}

json confusion_to_json(const ConfusionReport& r) {
  return json{{"tn", r.tn},
              {"fp", r.fp},
              {"fn", r.fn},
              {"tp", r.tp},
              {"error_negative", number_or_null(r.error_negative)},
              {"error_positive", number_or_null(r.error_positive)},
              {"fn_fp_ratio", number_or_null(r.fn_fp_ratio)},
              {"cost_weighted_error", r.cost_weighted_error},
              {"costs", {{"fp", r.costs.cost_fp}, {"fn", r.costs.cost_fn}}}};
}

ConfusionReport confusion_from_json(const json& j) {
  ConfusionReport r;
  r.tn = j.at("tn").get<long>();
  r.fp = j.at("fp").get<long>();
  r.fn = j.at("fn").get<long>();
  r.tp = j.at("tp").get<long>();
  auto get_or_nan = [&j](const char* key) {
    const auto& value = j.at(key);
    return value.is_null() ? std::numeric_limits<double>::quiet_NaN() : value.get<double>();
  };
  r.error_negative = get_or_nan("error_negative");
  r.error_positive = get_or_nan("error_positive");
  r.fn_fp_ratio = get_or_nan("fn_fp_ratio");
  r.cost_weighted_error = j.at("cost_weighted_error").get<double>();
  r.costs.cost_fp = j.at("costs").at("fp").get<double>();
  r.costs.cost_fn = j.at("costs").at("fn").get<double>();
  return r;
}

json summary_to_json(const FittedSummary& s) {
  return json{{"min", s.min}, {"q1", s.q1},   {"median", s.median},
              {"q3", s.q3},   {"max", s.max}, {"iqr", s.iqr()}};
}

FittedSummary summary_from_json(const json& j) {
  FittedSummary s;
  s.min = j.at("min").get<double>();
  s.q1 = j.at("q1").get<double>();
  s.median = j.at("median").get<double>();
  s.q3 = j.at("q3").get<double>();
  s.max = j.at("max").get<double>();
  return s;
}

}  // namespace

std::string confusion_text(const ConfusionReport& r, const std::string& negative_label,
                           const std::string& positive_label) {
  const std::string pred_neg = "Predict " + negative_label;
  const std::string pred_pos = "Predict " + positive_label;
  const std::string row_neg = "Actual " + negative_label;
  const std::string row_pos = "Actual " + positive_label;
  const std::size_t label_width = std::max(row_neg.size(), row_pos.size()) + 2;
  const std::size_t cell = std::max({pred_neg.size(), pred_pos.size(), std::size_t{12}}) + 3;

  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(label_width)) << "";
  out << std::right << std::setw(static_cast<int>(cell)) << pred_neg
      << std::setw(static_cast<int>(cell)) << pred_pos << std::setw(14) << "Model Error"
      << '\n';
  out << std::left << std::setw(static_cast<int>(label_width)) << row_neg << std::right
      << std::setw(static_cast<int>(cell)) << r.tn << std::setw(static_cast<int>(cell)) << r.fp
      << std::setw(14) << two_decimals(r.error_negative) << '\n';
  out << std::left << std::setw(static_cast<int>(label_width)) << row_pos << std::right
      << std::setw(static_cast<int>(cell)) << r.fn << std::setw(static_cast<int>(cell)) << r.tp
      << std::setw(14) << two_decimals(r.error_positive) << '\n';
  out << "N = " << r.total() << ", FN/FP ratio = " << two_decimals(r.fn_fp_ratio)
      << ", cost-weighted error = " << format_double(r.cost_weighted_error) << " (costs "
      << format_double(r.costs.cost_fp) << ":" << format_double(r.costs.cost_fn) << ")\n";
  return out.str();
}

std::string confusion_json(const ConfusionReport& report) {
  return confusion_to_json(report).dump(2);
}

FittedSummary summarize_fitted(const Eigen::VectorXd& fitted) {
  if (fitted.size() == 0) throw ValidationError("cannot summarize an empty fitted vector");
  std::vector<double> sorted(fitted.data(), fitted.data() + fitted.size());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&sorted](double q) {
    // type-7: linear interpolation between order statistics
    const double h = q * (static_cast<double>(sorted.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - std::floor(h);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  };
  FittedSummary s;
  s.min = sorted.front();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.max = sorted.back();
  return s;
}

void write_fitted_csv(const std::string& path, const Eigen::VectorXd& fitted) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<std::size_t>(fitted.size()));
  for (Eigen::Index i = 0; i < fitted.size(); ++i) {
    rows.push_back({std::to_string(i), format_double(fitted[i])});
  }
  write_csv_atomic(path, {"case", "fitted"}, rows);
}

std::string audit_json(const std::vector<CandidateResult>& candidates,
                       const SelectionAudit& audit) {
  json entries = json::array();
  for (const auto& entry : audit.entries) {
    const auto& c = candidates[entry.candidate_index];
    entries.push_back(json{{"index", entry.candidate_index},
                           {"kernel", c.kernel.name()},
                           {"rho", c.rho},
                           {"rank", c.rank},
                           {"fn_fp_ratio", number_or_null(c.fn_fp_ratio)},
                           {"cost_weighted_error", c.cost_weighted_error},
                           {"outcome", to_string(entry.outcome)},
                           {"detail", entry.detail}});
  }
  return json{{"candidates", entries}}.dump(2);
}

std::string comparison_text(const ComparisonReport& report) {
  std::ostringstream out;
  out << "KPCLR (" << report.kpclr_model << ")\n";
  out << confusion_text(report.kpclr);
  out << "fitted values: q1 " << two_decimals(report.kpclr_fitted.q1) << ", median "
      << two_decimals(report.kpclr_fitted.median) << ", q3 "
      << two_decimals(report.kpclr_fitted.q3) << ", IQR "
      << two_decimals(report.kpclr_fitted.iqr()) << "\n\n";
  out << "Stepwise logistic baseline (" << report.baseline_predictors.size()
      << " predictors)\n";
  out << confusion_text(report.baseline);
  out << "fitted values: q1 " << two_decimals(report.baseline_fitted.q1) << ", median "
      << two_decimals(report.baseline_fitted.median) << ", q3 "
      << two_decimals(report.baseline_fitted.q3) << ", IQR "
      << two_decimals(report.baseline_fitted.iqr()) << "\n";
  return out.str();
}

std::string comparison_json(const ComparisonReport& report) {
  return json{{"kpclr",
               {{"model", report.kpclr_model},
                {"confusion", confusion_to_json(report.kpclr)},
                {"fitted", summary_to_json(report.kpclr_fitted)}}},
              {"baseline",
               {{"predictors", report.baseline_predictors},
                {"confusion", confusion_to_json(report.baseline)},
                {"fitted", summary_to_json(report.baseline_fitted)}}}}
      .dump(2);
}

std::string render_report_json(const std::string& json_text) {
  json parsed;
  try {
    parsed = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("report file is not valid JSON: ") + e.what());
  }
  if (parsed.contains("kpclr") && parsed.contains("baseline")) {
    ComparisonReport report;
    report.kpclr = confusion_from_json(parsed["kpclr"].at("confusion"));
    report.kpclr_fitted = summary_from_json(parsed["kpclr"].at("fitted"));
    report.kpclr_model = parsed["kpclr"].value("model", "");
    report.baseline = confusion_from_json(parsed["baseline"].at("confusion"));
    report.baseline_fitted = summary_from_json(parsed["baseline"].at("fitted"));
    if (parsed["baseline"].contains("predictors")) {
      report.baseline_predictors =
          parsed["baseline"]["predictors"].get<std::vector<std::string>>();
    }
    return comparison_text(report);
  }
  if (parsed.contains("tn")) {
    return confusion_text(confusion_from_json(parsed));
  }
  if (parsed.contains("confusion")) {
    std::string text = confusion_text(confusion_from_json(parsed.at("confusion")));
    if (parsed.value("in_sample", false)) {
      text = "IN-SAMPLE (evaluated on the model's own training data)\n" + text;
    }
    return text;
  }
  throw ValidationError("unrecognized report layout; expected a confusion or comparison report");
}

}  // namespace kpcr
