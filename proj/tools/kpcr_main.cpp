// kpcr: kernel principal-components regression toolkit.
//
// Subcommands: simulate, fit, select, evaluate, predict, baseline, compare,
// report. Exit codes: 0 success, 1 validation error, 2 numerical failure,
// 3 selection found no admissible candidate.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kpcr/csv.hpp"
#include "kpcr/dataset.hpp"
#include "kpcr/errors.hpp"
#include "kpcr/model_io.hpp"
#include "kpcr/report.hpp"
#include "kpcr/selection.hpp"
#include "kpcr/stepwise.hpp"
#include "kpcr/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string input;
  std::string response;
  std::string schema;
  std::string costs;   // "FP:FN"
  std::string grid;    // config file
  std::string rho_list;
  std::uint64_t seed = 1;
  double ratio_tolerance = 0.25;
  std::string out;
};

kpcr::CostPair parse_costs(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw kpcr::ValidationError("--costs expects FP:FN, e.g. 2:1 (got '" + text + "')");
  }
  const auto fp = kpcr::parse_double(text.substr(0, colon));
  const auto fn = kpcr::parse_double(text.substr(colon + 1));
  if (!fp || !fn) {
    throw kpcr::ValidationError("--costs expects two numbers separated by ':' (got '" + text +
                                "')");
  }
  kpcr::CostPair costs{*fp, *fn};
  costs.validate();
  return costs;
}

std::vector<double> parse_rho_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream stream(text);
  std::string piece;
  while (std::getline(stream, piece, ',')) {
    const auto value = kpcr::parse_double(piece);
    if (!value) throw kpcr::ValidationError("--rho-list contains a non-number: '" + piece + "'");
    out.push_back(*value);
  }
  if (out.empty()) throw kpcr::ValidationError("--rho-list is empty");
  return out;
}

std::vector<std::string> load_schema(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw kpcr::ValidationError("cannot open schema file: " + path);
  json parsed;
  try {
    parsed = json::parse(in);
  } catch (const json::parse_error& e) {
    throw kpcr::ValidationError(std::string("schema file is not valid JSON: ") + e.what());
  }
  for (const auto& [key, value] : parsed.items()) {
    if (key != "categorical") {
      throw kpcr::ValidationError("schema file has unknown key '" + key +
                                  "' (only \"categorical\" is accepted)");
    }
  }
  if (!parsed.contains("categorical")) return {};
  return parsed["categorical"].get<std::vector<std::string>>();
}

struct GridSettings {
  kpcr::SearchGrid grid;
  double ratio_tolerance = 0.25;
};

// Grid config file. Strictly validated; CLI flags override file values.
GridSettings load_grid(const CommonOptions& opts, bool costs_flag_set, bool seed_flag_set,
                       bool tolerance_flag_set) {
  kpcr::CostPair costs{2.0, 1.0};
  std::uint64_t seed = opts.seed;
  kpcr::SearchGrid grid = kpcr::SearchGrid::defaults(costs, seed);
  double tolerance = 0.25;

  if (!opts.grid.empty()) {
    std::ifstream in(opts.grid);
    if (!in) throw kpcr::ValidationError("cannot open grid config: " + opts.grid);
    json parsed;
    try {
      parsed = json::parse(in);
    } catch (const json::parse_error& e) {
      throw kpcr::ValidationError(std::string("grid config is not valid JSON: ") + e.what());
    }
    for (const auto& [key, value] : parsed.items()) {
      if (key != "kernels" && key != "rho" && key != "costs" && key != "seed" &&
          key != "ratio_tolerance") {
        throw kpcr::ValidationError("grid config has unknown key '" + key + "'");
      }
    }
    if (parsed.contains("kernels")) {
      grid.kernels.clear();
      for (const auto& k : parsed["kernels"]) {
        for (const auto& [key, value] : k.items()) {
          if (key != "family" && key != "gamma" && key != "degree") {
            throw kpcr::ValidationError("grid kernel entry has unknown key '" + key + "'");
          }
        }
        kpcr::KernelSpec spec;
        spec.family = kpcr::kernel_family_from_string(k.value("family", "anova"));
        if (!k.contains("gamma")) {
          throw kpcr::ValidationError("grid kernel entry is missing \"gamma\"");
        }
        spec.gamma = k["gamma"].get<double>();
        spec.degree = k.value("degree", 1);
        spec.validate();
        grid.kernels.push_back(spec);
      }
    }
    if (parsed.contains("rho")) grid.rhos = parsed["rho"].get<std::vector<double>>();
    if (parsed.contains("costs")) {
      const auto& c = parsed["costs"];
      for (const auto& [key, value] : c.items()) {
        if (key != "fp" && key != "fn") {
          throw kpcr::ValidationError("grid costs entry has unknown key '" + key + "'");
        }
      }
      grid.costs = {c.at("fp").get<double>(), c.at("fn").get<double>()};
    }
    if (parsed.contains("seed")) grid.seed = parsed["seed"].get<std::uint64_t>();
    if (parsed.contains("ratio_tolerance")) {
      tolerance = parsed["ratio_tolerance"].get<double>();
    }
  }

  if (costs_flag_set) grid.costs = parse_costs(opts.costs);
  if (seed_flag_set || opts.grid.empty()) grid.seed = opts.seed;
  if (tolerance_flag_set) tolerance = opts.ratio_tolerance;
  if (!opts.rho_list.empty()) grid.rhos = parse_rho_list(opts.rho_list);
  grid.validate();
  if (!(tolerance > 0.0)) {
    throw kpcr::ValidationError("ratio tolerance must be positive");
  }
  return {std::move(grid), tolerance};
}

kpcr::EncodeResult load_input(const CommonOptions& opts) {
  if (opts.input.empty()) throw kpcr::ValidationError("--input is required");
  if (opts.response.empty()) throw kpcr::ValidationError("--response is required");
  const kpcr::CsvTable csv = kpcr::read_csv(opts.input);
  const kpcr::RawTable raw = kpcr::raw_from_csv(csv, opts.response, load_schema(opts.schema));
  kpcr::EncodeResult encoded = kpcr::load_and_encode(raw);
  if (encoded.dropped_incomplete > 0) {
    std::cout << "dropped " << encoded.dropped_incomplete << " incomplete row(s)\n";
  }
  return encoded;
}

void ensure_out_dir(const std::string& out) {
  if (out.empty()) throw kpcr::ValidationError("--out is required");
  fs::create_directories(out);
}

struct PreparedSplits {
  kpcr::SplitAssignment assignment;
  kpcr::Dataset train_z, validation_z, test_z;
  kpcr::StandardizationParams params;
  kpcr::Dataset train_raw, validation_raw, test_raw;  // encoded, unstandardized
};

PreparedSplits prepare_splits(const kpcr::Dataset& full, std::uint64_t seed, bool stratified) {
  PreparedSplits out;
  out.assignment = kpcr::split_three_way(full, seed, {1.0 / 3, 1.0 / 3, 1.0 / 3}, stratified);
  out.train_raw = kpcr::subset(full, out.assignment.train);
  out.validation_raw = kpcr::subset(full, out.assignment.validation);
  out.test_raw = kpcr::subset(full, out.assignment.test);
  auto [train_z, params] = kpcr::standardize(out.train_raw);
  out.train_z = std::move(train_z);
  out.params = std::move(params);
  out.validation_z = kpcr::apply_standardization(out.validation_raw, out.params);
  out.test_z = kpcr::apply_standardization(out.test_raw, out.params);
  return out;
}

std::string path_in(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

json evaluation_json(const kpcr::TestEvaluation& eval) {
  json out = json::parse(kpcr::confusion_json(eval.report));
  json envelope;
  envelope["confusion"] = out;
  envelope["in_sample"] = eval.in_sample;
  const kpcr::FittedSummary s = kpcr::summarize_fitted(eval.fitted);
  envelope["fitted"] = {{"min", s.min}, {"q1", s.q1},   {"median", s.median},
                        {"q3", s.q3},   {"max", s.max}, {"iqr", s.iqr()}};
  return envelope;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string kind = "nonlinear_binary";
  int n = 1500;
  std::uint64_t seed = 1;
  double noise = 0.1;
  std::string out;
};

void run_simulate(const SimulateOptions& opts) {
  if (opts.out.empty()) throw kpcr::ValidationError("--out is required");
  const kpcr::Dataset ds =
      kpcr::generate_synthetic(kpcr::synthetic_kind_from_string(opts.kind), opts.n, opts.seed,
                               opts.noise);
  std::vector<std::string> header = ds.feature_names;
  header.push_back("y");
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<std::size_t>(ds.n()));
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < ds.p(); ++j) row.push_back(kpcr::format_double(ds.X(i, j)));
    row.push_back(kpcr::format_double(ds.y[i]));
    rows.push_back(std::move(row));
  }
  kpcr::write_csv_atomic(opts.out, header, rows);
  std::cout << "wrote " << ds.n() << " cases to " << opts.out << "\n";
}

// --------------------------------------------------------------------- fit

struct FitOptions {
  CommonOptions common;
  std::string family = "anova";
  double gamma = 1.0;
  int degree = 2;
  double rho = 0.90;
  std::string dump_kernel;    // directory for K / K_tilde CSVs
  std::string dump_spectrum;  // file for the eigenvalue spectrum
};

void run_fit(const FitOptions& opts, bool costs_set) {
  const kpcr::EncodeResult encoded = load_input(opts.common);
  const kpcr::CostPair costs = costs_set ? parse_costs(opts.common.costs)
                                         : kpcr::CostPair{1.0, 1.0};
  kpcr::KernelSpec kernel;
  kernel.family = kpcr::kernel_family_from_string(opts.family);
  kernel.gamma = opts.gamma;
  kernel.degree = opts.degree;
  kernel.validate();

  auto [train_z, params] = kpcr::standardize(encoded.data);
  if (!opts.dump_kernel.empty() || !opts.dump_spectrum.empty()) {
    const kpcr::KernelMatrix K = kpcr::build_kernel_matrix(train_z.X, kernel);
    const kpcr::CenteredKernel ck = kpcr::center_kernel_matrix(K);
    if (!opts.dump_kernel.empty()) {
      fs::create_directories(opts.dump_kernel);
      kpcr::write_matrix_csv(path_in(opts.dump_kernel, "kernel.csv"), K.values);
      kpcr::write_matrix_csv(path_in(opts.dump_kernel, "kernel_centered.csv"), ck.values);
    }
    if (!opts.dump_spectrum.empty()) {
      kpcr::write_spectrum_csv(opts.dump_spectrum, kpcr::eigendecompose(ck));
    }
  }

  kpcr::FittedForecaster forecaster =
      kpcr::fit_forecaster(train_z, params, kernel, opts.rho, costs);
  forecaster.provenance.seed = opts.common.seed;
  forecaster.provenance.grid = "single fit: " + kernel.name() + ", rho=" +
                               kpcr::format_double(opts.rho);
  if (opts.common.out.empty()) throw kpcr::ValidationError("--out is required");
  kpcr::save_model(forecaster, opts.common.out);
  std::cout << "fit " << kernel.name() << " rho=" << opts.rho << " rank=" << forecaster.rank()
            << " link=" << (forecaster.glm.link == kpcr::Link::logit ? "logit" : "identity")
            << "\nmodel written to " << opts.common.out << "\n";
  if (forecaster.glm.separated) {
    std::cout << "warning: fit flagged as separated; forecasts may be degenerate\n";
  }
}

// ------------------------------------------------------------------ select

void run_select(const CommonOptions& opts, bool costs_set, bool seed_set, bool tolerance_set,
                bool stratified) {
  ensure_out_dir(opts.out);
  const kpcr::EncodeResult encoded = load_input(opts);
  const auto [grid, ratio_tolerance] = load_grid(opts, costs_set, seed_set, tolerance_set);
  const PreparedSplits splits = prepare_splits(encoded.data, grid.seed, stratified);
  kpcr::write_split_csv(path_in(opts.out, "splits.csv"), splits.assignment);

  const std::vector<kpcr::CandidateResult> results =
      kpcr::run_grid(splits.train_z, splits.validation_z, grid);
  kpcr::SelectionDecision decision;
  try {
    decision = kpcr::select_best(results, grid.costs.target_ratio(), ratio_tolerance);
  } catch (const kpcr::SelectionError&) {
    // Leave the full audit behind before failing; it lists the near misses.
    kpcr::write_diagnostics_csv(path_in(opts.out, "diagnostics.csv"),
                                kpcr::diagnostics_series(results));
    throw;
  }

  kpcr::SelectedModel selected;
  selected.winner = results[decision.winner_index];
  selected.audit = decision.audit;
  selected.forecaster = kpcr::fit_forecaster(splits.train_z, splits.params,
                                             selected.winner.kernel, selected.winner.rho,
                                             grid.costs);
  selected.forecaster.provenance.seed = grid.seed;
  selected.forecaster.provenance.grid = std::to_string(grid.kernels.size()) + " kernels x " +
                                        std::to_string(grid.rhos.size()) + " rho values";
  selected.forecaster.provenance.audit = path_in(opts.out, "audit.json");

  kpcr::write_diagnostics_csv(path_in(opts.out, "diagnostics.csv"),
                              kpcr::diagnostics_series(results, decision.winner_index));
  kpcr::write_file_atomic(path_in(opts.out, "audit.json"),
                          kpcr::audit_json(results, selected.audit));
  kpcr::save_model(selected.forecaster, path_in(opts.out, "model.json"));

  const kpcr::TestEvaluation eval = kpcr::evaluate_on_test(selected, splits.test_z);
  kpcr::write_file_atomic(path_in(opts.out, "test_report.json"),
                          evaluation_json(eval).dump(2) + "\n");
  kpcr::write_file_atomic(path_in(opts.out, "test_report.txt"),
                          kpcr::confusion_text(eval.report));
  kpcr::write_fitted_csv(path_in(opts.out, "test_fitted.csv"), eval.fitted);

  std::cout << "selected " << selected.winner.kernel.name() << " rho=" << selected.winner.rho
            << " (rank " << selected.winner.rank << ", validation FN/FP "
            << selected.winner.fn_fp_ratio << ", cost-weighted error "
            << selected.winner.cost_weighted_error << ")\n\ntest-split performance:\n"
            << kpcr::confusion_text(eval.report) << "\nartifacts in " << opts.out << "\n";
}

// ---------------------------------------------------------------- evaluate

void run_evaluate(const CommonOptions& opts, const std::string& model_path) {
  const kpcr::FittedForecaster model = kpcr::load_model(model_path);
  const kpcr::EncodeResult encoded = load_input(opts);
  const kpcr::Dataset z = kpcr::apply_standardization(encoded.data, model.standardization);
  const kpcr::TestEvaluation eval = kpcr::evaluate_forecaster(model, z);
  const std::string text = (eval.in_sample
                                ? "IN-SAMPLE (evaluated on the model's own training data)\n"
                                : std::string()) +
                           kpcr::confusion_text(eval.report);
  if (!opts.out.empty()) {
    kpcr::write_file_atomic(opts.out, evaluation_json(eval).dump(2) + "\n");
  }
  std::cout << text;
}

// ----------------------------------------------------------------- predict

void run_predict(const std::string& model_path, const std::string& input,
                 const std::string& out) {
  if (input.empty()) throw kpcr::ValidationError("--input is required");
  if (out.empty()) throw kpcr::ValidationError("--out is required");
  const kpcr::FittedForecaster model = kpcr::load_model(model_path);
  const kpcr::CsvTable csv = kpcr::read_csv(input);

  // The case file must carry exactly the model's feature schema
  // (pre-standardization), with an optional leading id column.
  std::optional<std::size_t> id_column;
  std::vector<std::string> feature_names;
  std::vector<std::size_t> feature_sources;
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    if (!id_column && (csv.header[c] == "id" || csv.header[c] == "case_id")) {
      id_column = c;
      continue;
    }
    feature_names.push_back(csv.header[c]);
    feature_sources.push_back(c);
  }
  std::vector<std::string> expected = model.standardization.columns;
  std::vector<std::string> got = feature_names;
  std::sort(expected.begin(), expected.end());
  std::sort(got.begin(), got.end());
  if (expected != got) {
    throw kpcr::ValidationError(
        "case columns do not match the model's feature schema (expected " +
        std::to_string(expected.size()) + " feature columns)");
  }

  std::vector<std::vector<std::string>> rows;
  rows.reserve(csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    Eigen::VectorXd raw(static_cast<Eigen::Index>(feature_sources.size()));
    for (std::size_t j = 0; j < feature_sources.size(); ++j) {
      const std::string& cell = csv.rows[i][feature_sources[j]];
      const auto value = kpcr::parse_double(cell);
      if (!value) {
        throw kpcr::ValidationError("non-numeric value '" + cell + "' in column '" +
                                    feature_names[j] + "' at data row " + std::to_string(i + 1));
      }
      raw[static_cast<Eigen::Index>(j)] = *value;
    }
    const kpcr::Prediction prediction = model.score_raw(raw, feature_names);
    const std::string id = id_column ? csv.rows[i][*id_column] : std::to_string(i);
    rows.push_back({id, kpcr::format_double(prediction.probability),
                    std::to_string(prediction.label)});
  }
  kpcr::write_csv_atomic(out, {"case", "probability", "class"}, rows);
  std::cout << "wrote " << rows.size() << " forecast(s) to " << out << "\n";
}

// ---------------------------------------------------------------- baseline

void run_baseline(const CommonOptions& opts, bool costs_set, bool stratified) {
  ensure_out_dir(opts.out);
  const kpcr::EncodeResult encoded = load_input(opts);
  const kpcr::CostPair costs = costs_set ? parse_costs(opts.costs) : kpcr::CostPair{2.0, 1.0};
  const PreparedSplits splits = prepare_splits(encoded.data, opts.seed, stratified);
  kpcr::write_split_csv(path_in(opts.out, "splits.csv"), splits.assignment);

  const kpcr::StepwisePath path = kpcr::backward_eliminate_aic(splits.train_z);
  kpcr::write_stepwise_csv(path_in(opts.out, "stepwise_path.csv"), path);
  const kpcr::BaselineEvaluation eval =
      kpcr::fit_and_evaluate_baseline(path, splits.validation_z, splits.test_z, costs);

  json model_json;
  model_json["predictors"] = eval.model.predictors;
  model_json["threshold"] = eval.model.threshold;
  model_json["dropped_constant"] = eval.model.dropped_constant;
  json coefs = json::array();
  for (Eigen::Index i = 0; i < eval.model.fit.coefficients.size(); ++i) {
    coefs.push_back(eval.model.fit.coefficients[i]);
  }
  model_json["coefficients"] = coefs;
  kpcr::write_file_atomic(path_in(opts.out, "baseline_model.json"), model_json.dump(2) + "\n");

  kpcr::TestEvaluation as_eval;
  as_eval.report = eval.test_report;
  as_eval.fitted = eval.test_fitted;
  kpcr::write_file_atomic(path_in(opts.out, "baseline_report.json"),
                          evaluation_json(as_eval).dump(2) + "\n");
  kpcr::write_file_atomic(path_in(opts.out, "baseline_report.txt"),
                          kpcr::confusion_text(eval.test_report));
  kpcr::write_fitted_csv(path_in(opts.out, "baseline_fitted.csv"), eval.test_fitted);

  std::cout << "backward elimination: " << path.initial_aic << " -> " << path.final_aic
            << " AIC, " << eval.model.predictors.size() << " predictor(s) kept\n"
            << (path.intercept_only ? "final model is intercept-only\n" : "")
            << "\ntest-split performance (threshold " << eval.model.threshold << "):\n"
            << kpcr::confusion_text(eval.test_report) << "\nartifacts in " << opts.out << "\n";
}

// ----------------------------------------------------------------- compare

void run_compare(const CommonOptions& opts, bool costs_set, bool seed_set, bool tolerance_set,
                 bool stratified) {
  ensure_out_dir(opts.out);
  const kpcr::EncodeResult encoded = load_input(opts);
  const auto [grid, ratio_tolerance] = load_grid(opts, costs_set, seed_set, tolerance_set);

  // Both methods consume the same split assignment and the same costs.
  const PreparedSplits splits = prepare_splits(encoded.data, grid.seed, stratified);
  kpcr::write_split_csv(path_in(opts.out, "splits.csv"), splits.assignment);

  const std::vector<kpcr::CandidateResult> results =
      kpcr::run_grid(splits.train_z, splits.validation_z, grid);
  const kpcr::SelectionDecision decision =
      kpcr::select_best(results, grid.costs.target_ratio(), ratio_tolerance);
  kpcr::SelectedModel selected;
  selected.winner = results[decision.winner_index];
  selected.audit = decision.audit;
  selected.forecaster = kpcr::fit_forecaster(splits.train_z, splits.params,
                                             selected.winner.kernel, selected.winner.rho,
                                             grid.costs);
  selected.forecaster.provenance.seed = grid.seed;
  kpcr::write_diagnostics_csv(path_in(opts.out, "diagnostics.csv"),
                              kpcr::diagnostics_series(results, decision.winner_index));
  kpcr::write_file_atomic(path_in(opts.out, "audit.json"),
                          kpcr::audit_json(results, selected.audit));
  kpcr::save_model(selected.forecaster, path_in(opts.out, "model.json"));
  const kpcr::TestEvaluation kpclr_eval = kpcr::evaluate_on_test(selected, splits.test_z);
  kpcr::write_fitted_csv(path_in(opts.out, "kpclr_fitted.csv"), kpclr_eval.fitted);

  const kpcr::StepwisePath path = kpcr::backward_eliminate_aic(splits.train_z);
  kpcr::write_stepwise_csv(path_in(opts.out, "stepwise_path.csv"), path);
  const kpcr::BaselineEvaluation baseline_eval =
      kpcr::fit_and_evaluate_baseline(path, splits.validation_z, splits.test_z, grid.costs);
  kpcr::write_fitted_csv(path_in(opts.out, "baseline_fitted.csv"), baseline_eval.test_fitted);

  kpcr::ComparisonReport comparison;
  comparison.kpclr = kpclr_eval.report;
  comparison.baseline = baseline_eval.test_report;
  comparison.kpclr_fitted = kpcr::summarize_fitted(kpclr_eval.fitted);
  comparison.baseline_fitted = kpcr::summarize_fitted(baseline_eval.test_fitted);
  comparison.kpclr_model = selected.winner.kernel.name() + " rho=" +
                           kpcr::format_double(selected.winner.rho) + " (rank " +
                           std::to_string(selected.winner.rank) + ")";
  comparison.baseline_predictors = baseline_eval.model.predictors;
  kpcr::write_file_atomic(path_in(opts.out, "side_by_side.json"),
                          kpcr::comparison_json(comparison) + "\n");
  kpcr::write_file_atomic(path_in(opts.out, "side_by_side.txt"),
                          kpcr::comparison_text(comparison));
  std::cout << kpcr::comparison_text(comparison) << "\nartifacts in " << opts.out << "\n";
}

// ------------------------------------------------------------------ report

void run_report(const std::string& input, const std::string& out) {
  if (input.empty()) throw kpcr::ValidationError("--input is required");
  std::ifstream in(input);
  if (!in) throw kpcr::ValidationError("cannot open report file: " + input);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = kpcr::render_report_json(buffer.str());
  if (!out.empty()) kpcr::write_file_atomic(out, text);
  std::cout << text;
}

void add_common(CLI::App* sub, CommonOptions& opts, bool with_grid = true) {
  sub->add_option("--input", opts.input, "input CSV (header row required)");
  sub->add_option("--response", opts.response, "response column name");
  sub->add_option("--schema", opts.schema,
                  "JSON schema file declaring categorical columns");
  sub->add_option("--costs", opts.costs, "cost pair FP:FN, e.g. 2:1");
  if (with_grid) {
    sub->add_option("--grid", opts.grid, "grid config JSON file");
    sub->add_option("--rho-list", opts.rho_list, "comma-separated rho values");
    sub->add_option("--ratio-tolerance", opts.ratio_tolerance,
                    "relative tolerance for the FN/FP ratio cut (default 0.25)");
  }
  sub->add_option("--seed", opts.seed, "random seed for the three-way split");
  sub->add_option("--out", opts.out, "output path or directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel principal-components regression toolkit"};
  app.require_subcommand(1);

  SimulateOptions simulate_opts;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset CSV");
  simulate->add_option("--kind", simulate_opts.kind,
                       "regression1d or nonlinear_binary (default)");
  simulate->add_option("--n", simulate_opts.n, "number of cases (default 1500)");
  simulate->add_option("--seed", simulate_opts.seed, "generator seed");
  simulate->add_option("--noise", simulate_opts.noise,
                       "noise scale: sd for regression1d, flip probability for "
                       "nonlinear_binary");
  simulate->add_option("--out", simulate_opts.out, "output CSV path");

  FitOptions fit_opts;
  auto* fit = app.add_subcommand("fit", "fit one forecaster on the whole input");
  add_common(fit, fit_opts.common, /*with_grid=*/false);
  fit->add_option("--family", fit_opts.family, "kernel family: anova (default) or radial");
  fit->add_option("--gamma", fit_opts.gamma, "kernel scale > 0");
  fit->add_option("--degree", fit_opts.degree, "anova degree (default 2)");
  fit->add_option("--rho", fit_opts.rho, "variance fraction for rank selection");
  fit->add_option("--dump-kernel", fit_opts.dump_kernel,
                  "directory for full-precision K and centered-K CSV dumps");
  fit->add_option("--dump-spectrum", fit_opts.dump_spectrum,
                  "CSV path for the eigenvalue spectrum");

  CommonOptions select_opts;
  bool select_stratified = false;
  auto* select = app.add_subcommand(
      "select", "three-split grid search, two-cut selection, honest test report");
  add_common(select, select_opts);
  select->add_flag("--stratified", select_stratified, "stratify the split by class");

  CommonOptions evaluate_opts;
  std::string evaluate_model;
  auto* evaluate = app.add_subcommand("evaluate", "confusion report of a model on labeled data");
  add_common(evaluate, evaluate_opts, /*with_grid=*/false);
  evaluate->add_option("--model", evaluate_model, "model JSON file")->required();

  std::string predict_model, predict_input, predict_out;
  auto* predict = app.add_subcommand("predict", "score new cases with a saved model");
  predict->add_option("--model", predict_model, "model JSON file")->required();
  predict->add_option("--input", predict_input, "cases CSV matching the model schema");
  predict->add_option("--out", predict_out, "forecasts CSV path");

  CommonOptions baseline_opts;
  bool baseline_stratified = false;
  auto* baseline = app.add_subcommand(
      "baseline", "stepwise backward-AIC logistic baseline on the same protocol");
  add_common(baseline, baseline_opts, /*with_grid=*/false);
  baseline->add_flag("--stratified", baseline_stratified, "stratify the split by class");

  CommonOptions compare_opts;
  bool compare_stratified = false;
  auto* compare = app.add_subcommand(
      "compare", "KPCLR vs stepwise baseline on identical splits and costs");
  add_common(compare, compare_opts);
  compare->add_flag("--stratified", compare_stratified, "stratify the split by class");

  std::string report_input, report_out;
  auto* report = app.add_subcommand("report", "render a JSON report as an aligned text table");
  report->add_option("--input", report_input, "report JSON file");
  report->add_option("--out", report_out, "optional text output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (simulate->parsed()) {
      run_simulate(simulate_opts);
    } else if (fit->parsed()) {
      run_fit(fit_opts, fit->count("--costs") > 0);
    } else if (select->parsed()) {
      run_select(select_opts, select->count("--costs") > 0, select->count("--seed") > 0,
                 select->count("--ratio-tolerance") > 0, select_stratified);
    } else if (evaluate->parsed()) {
      run_evaluate(evaluate_opts, evaluate_model);
    } else if (predict->parsed()) {
      run_predict(predict_model, predict_input, predict_out);
    } else if (baseline->parsed()) {
      run_baseline(baseline_opts, baseline->count("--costs") > 0, baseline_stratified);
    } else if (compare->parsed()) {
      run_compare(compare_opts, compare->count("--costs") > 0, compare->count("--seed") > 0,
                  compare->count("--ratio-tolerance") > 0, compare_stratified);
    } else if (report->parsed()) {
      run_report(report_input, report_out);
    }
  } catch (const kpcr::SelectionError& e) {
    std::cerr << "selection error: " << e.what() << "\n";
    return 3;
  } catch (const kpcr::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const kpcr::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
