#include "kpcr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "kpcr/errors.hpp"
#include "kpcr/rng.hpp"

namespace kpcr {

namespace {

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan";
}

void check_finite(const Eigen::MatrixXd& X) {
  if (!X.allFinite()) throw ValidationError("predictor matrix contains non-finite values");
}

std::vector<int> class_indices(const Eigen::VectorXd& y, double label,
                               const std::vector<int>& pool) {
  std::vector<int> out;
  for (int i : pool) {
    if (y[i] == label) out.push_back(i);
  }
  return out;
}

// Split sizes: floor(p_i * N) with the remainder handed out front-to-back.
std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3>& props) {
  std::array<std::size_t, 3> sizes{};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    sizes[k] = static_cast<std::size_t>(std::floor(props[k] * static_cast<double>(n)));
    assigned += sizes[k];
  }
  std::size_t leftover = n - assigned;
  for (int k = 0; leftover > 0; k = (k + 1) % 3) {
    ++sizes[k];
    --leftover;
  }
  return sizes;
}

void assign_shuffled(Rng& rng, std::vector<int>& pool, const std::array<double, 3>& props,
                     SplitAssignment& out) {
  rng.shuffle(pool);
  const auto sizes = split_sizes(pool.size(), props);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < sizes[0]; ++i) out.train.push_back(pool[offset++]);
  for (std::size_t i = 0; i < sizes[1]; ++i) out.validation.push_back(pool[offset++]);
  for (std::size_t i = 0; i < sizes[2]; ++i) out.test.push_back(pool[offset++]);
}

void check_class_counts(const Eigen::VectorXd& y, const SplitAssignment& split) {
  const char* names[3] = {"training", "validation", "test"};
  const std::vector<int>* sets[3] = {&split.train, &split.validation, &split.test};
  for (int k = 0; k < 3; ++k) {
    long positives = 0;
    for (int i : *sets[k]) positives += y[i] == 1.0 ? 1 : 0;
    const long negatives = static_cast<long>(sets[k]->size()) - positives;
    if (positives < 2 || negatives < 2) {
      throw ValidationError(std::string("split '") + names[k] + "' has " +
                            std::to_string(positives) + " positive / " +
                            std::to_string(negatives) +
                            " negative cases; need >= 2 of each. Reseed or use "
                            "stratified splitting.");
    }
  }
}

}  // namespace

bool is_binary_response(const Eigen::VectorXd& y) {
  bool saw0 = false, saw1 = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0) {
      saw0 = true;
    } else if (y[i] == 1.0) {
      saw1 = true;
    } else {
      return false;
    }
  }
  return saw0 && saw1;
}

RawTable raw_from_csv(const CsvTable& csv, const std::string& response,
                      const std::vector<std::string>& categorical_overrides) {
  if (!csv.column_index(response)) {
    throw ValidationError("response column '" + response + "' not found in CSV header");
  }
  RawTable table;
  table.response = response;
  const std::set<std::string> overrides(categorical_overrides.begin(),
                                        categorical_overrides.end());
  for (const auto& name : overrides) {
    if (!csv.column_index(name)) {
      throw ValidationError("categorical column '" + name + "' not found in CSV header");
    }
  }
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    RawColumn column;
    column.name = csv.header[c];
    bool numeric = !overrides.count(column.name);
    if (numeric) {
      for (const auto& row : csv.rows) {
        if (is_missing(row[c])) continue;
        if (!parse_double(row[c])) {
          numeric = false;
          break;
        }
      }
    }
    column.kind = numeric ? ColumnKind::numeric : ColumnKind::categorical;
    table.columns.push_back(column);
  }
  table.rows = csv.rows;
  return table;
}

EncodeResult load_and_encode(const RawTable& table) {
  std::size_t response_col = table.columns.size();
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (table.columns[c].name == table.response) response_col = c;
  }
  if (response_col == table.columns.size()) {
    throw ValidationError("response column '" + table.response + "' missing from table");
  }

  // Complete rows only; the count of dropped rows is reported, not hidden.
  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    bool complete = true;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (is_missing(table.rows[r][c])) {
        complete = false;
        break;
      }
    }
    if (complete) kept.push_back(r);
  }
  EncodeResult result;
  result.dropped_incomplete = table.rows.size() - kept.size();
  if (kept.size() < 3) {
    throw ValidationError("fewer than 3 complete rows after dropping incomplete ones (" +
                          std::to_string(kept.size()) + ")");
  }

  // Plan output columns: numeric pass-through, categorical -> C-1 indicators
  // against the lexicographically first level.
  struct OutputColumn {
    std::size_t source;
    std::string level;  // empty for numeric pass-through
  };
  std::vector<std::string> names;
  std::vector<OutputColumn> plan;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c == response_col) continue;
    const auto& column = table.columns[c];
    if (column.kind == ColumnKind::numeric) {
      names.push_back(column.name);
      plan.push_back({c, ""});
      continue;
    }
    std::set<std::string> levels;
    for (std::size_t r : kept) levels.insert(table.rows[r][c]);
    if (levels.size() < 2) {
      throw ValidationError("categorical column '" + column.name +
                            "' has a single observed level; uninformative");
    }
    bool reference = true;
    for (const auto& level : levels) {
      if (reference) {
        reference = false;
        continue;
      }
      names.push_back(column.name + "=" + level);
      plan.push_back({c, level});
    }
  }

  const std::size_t n = kept.size();
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[kept[i]];
    for (std::size_t out = 0; out < plan.size(); ++out) {
      const auto& spec = plan[out];
      if (spec.level.empty()) {
        const auto value = parse_double(row[spec.source]);
        if (!value) {
          throw ValidationError("non-numeric value '" + row[spec.source] +
                                "' in numeric column '" + table.columns[spec.source].name +
                                "'");
        }
        X(i, static_cast<Eigen::Index>(out)) = *value;
      } else {
        X(i, static_cast<Eigen::Index>(out)) = row[spec.source] == spec.level ? 1.0 : 0.0;
      }
    }
  }
  check_finite(X);

  // Response: numeric pass-through, otherwise two sorted levels -> 0/1.
  Eigen::VectorXd y(n);
  bool numeric_response = table.columns[response_col].kind == ColumnKind::numeric;
  if (numeric_response) {
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = *parse_double(table.rows[kept[i]][response_col]);
    }
  } else {
    std::set<std::string> levels;
    for (std::size_t i = 0; i < n; ++i) levels.insert(table.rows[kept[i]][response_col]);
    if (levels.size() != 2) {
      throw ValidationError("categorical response must have exactly two observed classes, got " +
                            std::to_string(levels.size()));
    }
    result.response_levels.assign(levels.begin(), levels.end());
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = table.rows[kept[i]][response_col] == result.response_levels[1] ? 1.0 : 0.0;
    }
  }
  if (!y.allFinite()) throw ValidationError("response contains non-finite values");

  result.data = Dataset{std::move(X), std::move(y), std::move(names)};
  return result;
}

std::pair<Dataset, StandardizationParams> standardize(const Dataset& train) {
  check_finite(train.X);
  const auto n = train.n();
  if (n < 1) throw ValidationError("cannot standardize an empty dataset");

  StandardizationParams params;
  std::vector<Eigen::Index> retained;
  std::vector<double> means, sds;
  for (Eigen::Index c = 0; c < train.p(); ++c) {
    const double mean = train.X.col(c).mean();
    const double var = (train.X.col(c).array() - mean).square().mean();  // population 1/N
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
      retained.push_back(c);
      means.push_back(mean);
      sds.push_back(sd);
      params.columns.push_back(train.feature_names[c]);
    } else {
      params.dropped.push_back(train.feature_names[c]);
    }
  }
  if (retained.empty()) throw ValidationError("all training columns have zero variance");

  params.mean = Eigen::Map<Eigen::VectorXd>(means.data(), static_cast<Eigen::Index>(means.size()));
  params.sd = Eigen::Map<Eigen::VectorXd>(sds.data(), static_cast<Eigen::Index>(sds.size()));

  Dataset out;
  out.y = train.y;
  out.feature_names = params.columns;
  out.X.resize(n, static_cast<Eigen::Index>(retained.size()));
  for (std::size_t j = 0; j < retained.size(); ++j) {
    out.X.col(static_cast<Eigen::Index>(j)) =
        (train.X.col(retained[j]).array() - params.mean[static_cast<Eigen::Index>(j)]) /
        params.sd[static_cast<Eigen::Index>(j)];
  }
  return {std::move(out), std::move(params)};
}

Dataset apply_standardization(const Dataset& ds, const StandardizationParams& params) {
  check_finite(ds.X);
  // Map by name so datasets that still carry the dropped columns also work.
  std::vector<Eigen::Index> sources;
  sources.reserve(params.columns.size());
  for (const auto& name : params.columns) {
    auto it = std::find(ds.feature_names.begin(), ds.feature_names.end(), name);
    if (it == ds.feature_names.end()) {
      throw ValidationError("dataset lacks column '" + name + "' required by the parameters");
    }
    sources.push_back(static_cast<Eigen::Index>(it - ds.feature_names.begin()));
  }
  Dataset out;
  out.y = ds.y;
  out.feature_names = params.columns;
  out.X.resize(ds.n(), static_cast<Eigen::Index>(sources.size()));
  for (std::size_t j = 0; j < sources.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    out.X.col(jj) = (ds.X.col(sources[j]).array() - params.mean[jj]) / params.sd[jj];
  }
  return out;
}

Dataset undo_standardization(const Dataset& ds, const StandardizationParams& params) {
  if (ds.p() != params.mean.size()) {
    throw ValidationError("column count mismatch when undoing standardization");
  }
  Dataset out = ds;
  for (Eigen::Index j = 0; j < out.p(); ++j) {
    out.X.col(j) = ds.X.col(j).array() * params.sd[j] + params.mean[j];
  }
  return out;
}

SplitAssignment split_three_way(const Dataset& ds, std::uint64_t seed,
                                std::array<double, 3> proportions, bool stratified) {
  double sum = 0.0;
  for (double prop : proportions) {
    if (!(prop > 0.0)) throw ValidationError("split proportions must be positive");
    sum += prop;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("split proportions must sum to 1");

  SplitAssignment out;
  out.seed = seed;
  out.proportions = proportions;
  out.stratified = stratified;

  Rng rng(seed);
  std::vector<int> all(static_cast<std::size_t>(ds.n()));
  std::iota(all.begin(), all.end(), 0);

  const bool classification = is_binary_response(ds.y);
  if (stratified) {
    if (!classification) {
      throw ValidationError("stratified splitting requires a 0/1 response");
    }
    for (double label : {0.0, 1.0}) {
      std::vector<int> pool = class_indices(ds.y, label, all);
      assign_shuffled(rng, pool, proportions, out);
    }
  } else {
    assign_shuffled(rng, all, proportions, out);
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  std::sort(out.test.begin(), out.test.end());

  if (classification) check_class_counts(ds.y, out);
  return out;
}

Dataset subset(const Dataset& ds, const std::vector<int>& indices) {
  Dataset out;
  out.feature_names = ds.feature_names;
  out.X.resize(static_cast<Eigen::Index>(indices.size()), ds.p());
  out.y.resize(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out.X.row(ii) = ds.X.row(indices[i]);
    out.y[ii] = ds.y[indices[i]];
  }
  return out;
}

void write_split_csv(const std::string& path, const SplitAssignment& split) {
  std::vector<std::vector<std::string>> rows;
  auto emit = [&rows](const std::vector<int>& indices, const char* name) {
    for (int i : indices) rows.push_back({std::to_string(i), name});
  };
  emit(split.train, "train");
  emit(split.validation, "validation");
  emit(split.test, "test");
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::stoi(a[0]) < std::stoi(b[0]);
  });
  write_csv_atomic(path, {"index", "split"}, rows);
}

}  // namespace kpcr
