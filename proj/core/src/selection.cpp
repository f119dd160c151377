#include "kpcr/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "kpcr/csv.hpp"
#include "kpcr/errors.hpp"
#include "kpcr/kpca.hpp"

namespace kpcr {

void SearchGrid::validate() const {
  if (kernels.empty()) throw ValidationError("search grid needs at least one kernel");
  for (const auto& kernel : kernels) kernel.validate();
  if (rhos.empty()) throw ValidationError("search grid needs at least one rho value");
  double prev = 0.0;
  for (double rho : rhos) {
    if (!(rho > 0.0) || rho > 1.0) throw ValidationError("rho values must lie in (0, 1]");
    if (rho <= prev) throw ValidationError("rho values must be strictly increasing");
    prev = rho;
  }
  costs.validate();
}

SearchGrid SearchGrid::defaults(const CostPair& costs, std::uint64_t seed) {
  SearchGrid grid;
  for (int degree : {2, 3}) {
    for (double gamma : {0.1, 3.0}) {
      grid.kernels.push_back({KernelFamily::anova, gamma, degree});
    }
  }
  for (int i = 0; i <= 13; ++i) grid.rhos.push_back(0.30 + 0.05 * i);
  grid.costs = costs;
  grid.seed = seed;
  return grid;
}

namespace {

std::string describe(const CandidateResult& c) {
  std::ostringstream out;
  out << c.kernel.name() << " rho=" << format_double(c.rho);
  return out.str();
}

}  // namespace

std::vector<CandidateResult> run_grid(const Dataset& train_z, const Dataset& validation_z,
                                      const SearchGrid& grid) {
  grid.validate();
  if (!is_binary_response(train_z.y) || !is_binary_response(validation_z.y)) {
    throw ValidationError("grid search needs 0/1 responses with both classes present");
  }
  if (train_z.p() != validation_z.p()) {
    throw ValidationError("training and validation data have different widths");
  }

  std::vector<CandidateResult> results;
  results.reserve(grid.kernels.size() * grid.rhos.size());

  std::vector<int> actual(static_cast<std::size_t>(validation_z.n()));
  for (Eigen::Index i = 0; i < validation_z.n(); ++i) {
    actual[static_cast<std::size_t>(i)] = validation_z.y[i] == 1.0 ? 1 : 0;
  }
  const Eigen::VectorXd weights = cost_weights(train_z.y, grid.costs);

  for (const auto& kernel : grid.kernels) {
    // One centering + decomposition per kernel, shared across rho values.
    CenteredKernel ck;
    KpcBasis basis;
    Eigen::MatrixXd validation_rows;  // centered kernel rows, one per case
    std::string kernel_failure;
    try {
      ck = center_kernel_matrix(build_kernel_matrix(train_z.X, kernel));
      basis = eigendecompose(ck);
      validation_rows.resize(validation_z.n(), train_z.n());
      for (Eigen::Index i = 0; i < validation_z.n(); ++i) {
        validation_rows.row(i) =
            new_point_kernel_row(validation_z.X.row(i), train_z.X, kernel, ck.stats)
                .transpose();
      }
    } catch (const std::exception& e) {
      kernel_failure = e.what();
    }

    // Candidates with the same selected rank are the same model; cache fits.
    std::map<int, CandidateResult> by_rank;
    for (double rho : grid.rhos) {
      CandidateResult candidate;
      candidate.kernel = kernel;
      candidate.rho = rho;
      if (!kernel_failure.empty()) {
        candidate.failed = true;
        candidate.failure = kernel_failure;
        results.push_back(candidate);
        continue;
      }
      try {
        const int r = select_rank(basis, rho);
        auto cached = by_rank.find(r);
        if (cached != by_rank.end()) {
          candidate = cached->second;
          candidate.rho = rho;
          results.push_back(candidate);
          continue;
        }
        const PcRegressors training = project_training(ck, basis, r);
        const GlmFit fit = fit_weighted_logistic(training.scores, train_z.y, weights);
        const Eigen::MatrixXd validation_scores =
            validation_rows * basis.eigenvectors.leftCols(r) *
            basis.eigenvalues.head(r).cwiseSqrt().cwiseInverse().asDiagonal();
        const Eigen::VectorXd probabilities = fitted_values(fit, validation_scores);
        // Weighted fit, so the costs are already inside; classify at 1/2.
        const std::vector<int> predicted = classify(probabilities, 0.5);
        candidate.rank = r;
        candidate.validation_report = confusion_report(predicted, actual, grid.costs);
        candidate.fn_fp_ratio = candidate.validation_report.fn_fp_ratio;
        candidate.cost_weighted_error = candidate.validation_report.cost_weighted_error;
        by_rank.emplace(r, candidate);
      } catch (const std::exception& e) {
        candidate.failed = true;
        candidate.failure = e.what();
      }
      results.push_back(candidate);
    }
  }
  return results;
}

std::string to_string(CandidateOutcome outcome) {
  switch (outcome) {
    case CandidateOutcome::selected: return "selected";
    case CandidateOutcome::passed_both_cuts: return "passed";
    case CandidateOutcome::failed_cut1: return "failed_cut1";
    case CandidateOutcome::failed_cut2: return "failed_cut2";
    case CandidateOutcome::errored: return "errored";
  }
  return "unknown";
}

SelectionDecision select_best(const std::vector<CandidateResult>& results, double target_ratio,
                              double ratio_tolerance) {
  if (results.empty()) throw ValidationError("select_best called with no candidates");
  if (!(target_ratio > 0.0)) throw ValidationError("target ratio must be positive");
  if (!(ratio_tolerance > 0.0)) throw ValidationError("ratio tolerance must be positive");

  SelectionDecision decision;
  decision.audit.entries.resize(results.size());

  // Cut 1: achieved FN/FP ratio close enough (relative) to the target.
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& entry = decision.audit.entries[i];
    entry.candidate_index = i;
    const auto& c = results[i];
    if (c.failed) {
      entry.outcome = CandidateOutcome::errored;
      entry.detail = c.failure;
      continue;
    }
    if (!std::isfinite(c.fn_fp_ratio)) {
      entry.outcome = CandidateOutcome::failed_cut1;
      entry.detail = "FN/FP ratio undefined (no false positives)";
      continue;
    }
    const double deviation = std::abs(c.fn_fp_ratio - target_ratio) / target_ratio;
    if (deviation > ratio_tolerance) {
      entry.outcome = CandidateOutcome::failed_cut1;
      entry.detail = "ratio " + format_double(c.fn_fp_ratio) + " off target by " +
                     format_double(deviation);
      continue;
    }
    entry.outcome = CandidateOutcome::passed_both_cuts;  // provisional
    survivors.push_back(i);
  }

  if (survivors.empty()) {
    // Report the nearest misses so the caller can widen the grid or tolerance.
    std::vector<std::pair<double, std::size_t>> nearest;
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (results[i].failed || !std::isfinite(results[i].fn_fp_ratio)) continue;
      nearest.push_back({std::abs(results[i].fn_fp_ratio - target_ratio), i});
    }
    std::sort(nearest.begin(), nearest.end());
    std::ostringstream message;
    message << "no candidate achieved an FN/FP ratio within " << format_double(ratio_tolerance)
            << " (relative) of " << format_double(target_ratio) << ".";
    if (nearest.empty()) {
      message << " Every candidate failed or had an undefined ratio.";
    } else {
      message << " Nearest:";
      for (std::size_t k = 0; k < std::min<std::size_t>(3, nearest.size()); ++k) {
        const auto& c = results[nearest[k].second];
        message << " [" << describe(c) << " ratio=" << format_double(c.fn_fp_ratio) << "]";
      }
    }
    throw SelectionError(message.str());
  }

  // Cut 2: within 5% of the best surviving cost-weighted validation error.
  double best_error = results[survivors.front()].cost_weighted_error;
  for (std::size_t i : survivors) {
    best_error = std::min(best_error, results[i].cost_weighted_error);
  }
  std::vector<std::size_t> finalists;
  for (std::size_t i : survivors) {
    if (results[i].cost_weighted_error <= best_error * 1.05 + 1e-12) {
      finalists.push_back(i);
    } else {
      decision.audit.entries[i].outcome = CandidateOutcome::failed_cut2;
      decision.audit.entries[i].detail =
          "cost-weighted error " + format_double(results[i].cost_weighted_error) +
          " vs best " + format_double(best_error);
    }
  }

  // Fewest components wins; ties fall to smaller gamma, then smaller degree.
  auto better = [&results](std::size_t a, std::size_t b) {
    const auto& ca = results[a];
    const auto& cb = results[b];
    if (ca.rank != cb.rank) return ca.rank < cb.rank;
    if (ca.kernel.gamma != cb.kernel.gamma) return ca.kernel.gamma < cb.kernel.gamma;
    if (ca.kernel.degree != cb.kernel.degree) return ca.kernel.degree < cb.kernel.degree;
    return a < b;
  };
  std::size_t winner = finalists.front();
  for (std::size_t i : finalists) {
    if (better(i, winner)) winner = i;
  }
  decision.winner_index = winner;
  decision.audit.entries[winner].outcome = CandidateOutcome::selected;
  decision.audit.entries[winner].detail =
      "ratio " + format_double(results[winner].fn_fp_ratio) + ", cost-weighted error " +
      format_double(results[winner].cost_weighted_error) + ", r=" +
      std::to_string(results[winner].rank);
  return decision;
}

SelectedModel run_selection(const Dataset& train_z, const Dataset& validation_z,
                            const StandardizationParams& params, const SearchGrid& grid,
                            double ratio_tolerance) {
  const std::vector<CandidateResult> results = run_grid(train_z, validation_z, grid);
  const SelectionDecision decision =
      select_best(results, grid.costs.target_ratio(), ratio_tolerance);

  SelectedModel selected;
  selected.winner = results[decision.winner_index];
  selected.audit = decision.audit;
  selected.forecaster =
      fit_forecaster(train_z, params, selected.winner.kernel, selected.winner.rho, grid.costs);
  selected.forecaster.provenance.seed = grid.seed;
  selected.forecaster.provenance.grid =
      std::to_string(grid.kernels.size()) + " kernels x " + std::to_string(grid.rhos.size()) +
      " rho values, costs " + format_double(grid.costs.cost_fp) + ":" +
      format_double(grid.costs.cost_fn);
  return selected;
}

std::vector<DiagnosticsSeries> diagnostics_series(const std::vector<CandidateResult>& results,
                                                  std::optional<std::size_t> selected_index) {
  std::vector<DiagnosticsSeries> series;
  auto find_series = [&series](const KernelSpec& kernel) -> DiagnosticsSeries& {
    for (auto& s : series) {
      if (s.kernel.family == kernel.family && s.kernel.gamma == kernel.gamma &&
          s.kernel.degree == kernel.degree) {
        return s;
      }
    }
    series.push_back({kernel, {}});
    return series.back();
  };
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& c = results[i];
    DiagnosticsPoint point;
    point.rho = c.rho;
    point.rank = c.rank;
    point.fn_fp_ratio = c.fn_fp_ratio;
    point.cost_weighted_error = c.cost_weighted_error;
    point.failed = c.failed;
    point.selected = selected_index && *selected_index == i;
    find_series(c.kernel).points.push_back(point);
  }
  for (auto& s : series) {
    std::stable_sort(s.points.begin(), s.points.end(),
                     [](const DiagnosticsPoint& a, const DiagnosticsPoint& b) {
                       return a.rho < b.rho;
                     });
  }
  return series;
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsSeries>& series) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : series) {
    for (const auto& point : s.points) {
      rows.push_back({s.kernel.name(), format_double(s.kernel.gamma),
                      std::to_string(s.kernel.degree), format_double(point.rho),
                      std::to_string(point.rank),
                      point.failed ? "" : format_double(point.fn_fp_ratio),
                      point.failed ? "" : format_double(point.cost_weighted_error),
                      point.failed ? "1" : "0", point.selected ? "1" : "0"});
    }
  }
  write_csv_atomic(path,
                   {"kernel", "gamma", "degree", "rho", "rank", "fn_fp_ratio",
                    "cost_weighted_error", "failed", "selected"},
                   rows);
}

TestEvaluation evaluate_forecaster(const FittedForecaster& forecaster, const Dataset& test_z) {
  if (forecaster.glm.link != Link::logit) {
    throw ValidationError("confusion-table evaluation needs a classification model");
  }
  if (test_z.p() != forecaster.training_matrix.cols()) {
    throw ValidationError("test data width does not match the model");
  }

  TestEvaluation eval;
  eval.in_sample = test_z.n() == forecaster.training_matrix.rows() &&
                   (test_z.X - forecaster.training_matrix).cwiseAbs().maxCoeff() <= 1e-12;

  eval.fitted.resize(test_z.n());
  std::vector<int> predicted(static_cast<std::size_t>(test_z.n()));
  std::vector<int> actual(static_cast<std::size_t>(test_z.n()));
  for (Eigen::Index i = 0; i < test_z.n(); ++i) {
    const Prediction prediction = forecaster.score_standardized(test_z.X.row(i));
    eval.fitted[i] = prediction.probability;
    predicted[static_cast<std::size_t>(i)] = prediction.label;
    actual[static_cast<std::size_t>(i)] = test_z.y[i] == 1.0 ? 1 : 0;
  }
  eval.report = confusion_report(predicted, actual, forecaster.costs);
  return eval;
}

TestEvaluation evaluate_on_test(const SelectedModel& selected, const Dataset& test_z) {
  return evaluate_forecaster(selected.forecaster, test_z);
}

}  // namespace kpcr
