#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kpcr/dataset.hpp"
#include "kpcr/forecaster.hpp"
#include "kpcr/glm.hpp"
#include "kpcr/kernel.hpp"

namespace kpcr {

struct SearchGrid {
  std::vector<KernelSpec> kernels;
  std::vector<double> rhos;  // strictly increasing, each in (0, 1]
  CostPair costs;
  std::uint64_t seed = 1;

  void validate() const;
  /// Four ANOVA kernels (gamma 0.1 or 3, degree 2 or 3) and rho 0.30..0.95
  /// in steps of 0.05.
  static SearchGrid defaults(const CostPair& costs, std::uint64_t seed);
};

struct CandidateResult {
  KernelSpec kernel;
  double rho = 0.0;
  int rank = 0;
  ConfusionReport validation_report;
  double fn_fp_ratio = 0.0;          // NaN when undefined (no false positives)
  double cost_weighted_error = 0.0;  // on validation data
  bool failed = false;
  std::string failure;
};

/// One candidate per (kernel, rho): fit on training, score validation through
/// the full new-case path. The per-kernel centering and eigendecomposition are
/// computed once and shared across rho values. A failing candidate is marked
/// and the run continues.
std::vector<CandidateResult> run_grid(const Dataset& train_z, const Dataset& validation_z,
                                      const SearchGrid& grid);

enum class CandidateOutcome { selected, passed_both_cuts, failed_cut1, failed_cut2, errored };

std::string to_string(CandidateOutcome outcome);

struct SelectionAudit {
  struct Entry {
    std::size_t candidate_index = 0;
    CandidateOutcome outcome = CandidateOutcome::errored;
    std::string detail;
  };
  std::vector<Entry> entries;  // one per candidate, in grid order
};

struct SelectionDecision {
  std::size_t winner_index = 0;
  SelectionAudit audit;
};

/// The two-cut rule. Cut 1 keeps candidates whose achieved FN/FP ratio is
/// within ratio_tolerance (relative) of target_ratio; cut 2 keeps those within
/// 5% of the best surviving cost-weighted validation error; the winner is the
/// survivor with the fewest components (ties: smaller gamma, then degree).
/// Throws SelectionError listing the nearest ratios when cut 1 empties.
SelectionDecision select_best(const std::vector<CandidateResult>& results, double target_ratio,
                              double ratio_tolerance = 0.25);

struct SelectedModel {
  CandidateResult winner;
  FittedForecaster forecaster;
  SelectionAudit audit;
};

/// run_grid + select_best + refit of the winning candidate into a forecaster.
SelectedModel run_selection(const Dataset& train_z, const Dataset& validation_z,
                            const StandardizationParams& params, const SearchGrid& grid,
                            double ratio_tolerance = 0.25);

struct DiagnosticsPoint {
  double rho = 0.0;
  int rank = 0;
  double fn_fp_ratio = 0.0;
  double cost_weighted_error = 0.0;
  bool failed = false;
  bool selected = false;
};

struct DiagnosticsSeries {
  KernelSpec kernel;
  std::vector<DiagnosticsPoint> points;  // in rho order
};

/// Per-kernel (rho, FN/FP ratio, cost-weighted error) series for the two-axis
/// selection plot; failed candidates are gaps, the winning point is marked.
std::vector<DiagnosticsSeries> diagnostics_series(
    const std::vector<CandidateResult>& results,
    std::optional<std::size_t> selected_index = std::nullopt);

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsSeries>& series);

struct TestEvaluation {
  ConfusionReport report;
  Eigen::VectorXd fitted;  // fitted probabilities for every test case
  bool in_sample = false;  // set when the data is the model's own training set
};

/// Honest test-set performance through the full prediction path. The data
/// must already be standardized with the training parameters. When the set is
/// bit-identical to the stored training matrix the report is labeled
/// IN-SAMPLE instead of being silently presented as a forecast.
TestEvaluation evaluate_on_test(const SelectedModel& selected, const Dataset& test_z);
TestEvaluation evaluate_forecaster(const FittedForecaster& forecaster, const Dataset& test_z);

}  // namespace kpcr
