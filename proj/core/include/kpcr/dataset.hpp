#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kpcr/csv.hpp"

namespace kpcr {

enum class ColumnKind { numeric, categorical };

struct RawColumn {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
};

/// Pre-encoding tabular data. Cells are text; "" and "NA" mark missing values.
struct RawTable {
  std::vector<RawColumn> columns;
  std::vector<std::vector<std::string>> rows;
  std::string response;
};

/// Build a RawTable from a parsed CSV. Column kinds are inferred (a column is
/// numeric when every non-missing cell parses as a finite number) unless the
/// name is listed in categorical_overrides.
RawTable raw_from_csv(const CsvTable& csv, const std::string& response,
                      const std::vector<std::string>& categorical_overrides = {});

struct Dataset {
  Eigen::MatrixXd X;                       // N x p, all finite
  Eigen::VectorXd y;                       // 0/1 labels or numeric response
  std::vector<std::string> feature_names;  // length p

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

/// True when y is coded 0/1 with both classes present.
bool is_binary_response(const Eigen::VectorXd& y);

struct EncodeResult {
  Dataset data;
  std::size_t dropped_incomplete = 0;
  // Two observed response levels (sorted; first -> 0) when the response was
  // categorical/binary text; empty for a numeric response.
  std::vector<std::string> response_levels;
};

/// Encode categoricals as C-1 indicators (reference level = first in sorted
/// order), pass numerics through, drop incomplete rows.
EncodeResult load_and_encode(const RawTable& table);

struct StandardizationParams {
  std::vector<std::string> columns;  // retained columns, in output order
  Eigen::VectorXd mean;              // per retained column
  Eigen::VectorXd sd;                // population (1/N) standard deviation, > 0
  std::vector<std::string> dropped;  // zero-variance training columns
};

/// z-score the training data; zero-variance columns are dropped and recorded.
std::pair<Dataset, StandardizationParams> standardize(const Dataset& train);
/// Transform any dataset with training parameters (never its own statistics).
Dataset apply_standardization(const Dataset& ds, const StandardizationParams& params);
/// Invert the transform (for round-trip checks and exports).
Dataset undo_standardization(const Dataset& ds, const StandardizationParams& params);

struct SplitAssignment {
  std::uint64_t seed = 0;
  std::array<double, 3> proportions{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::vector<int> train;
  std::vector<int> validation;
  std::vector<int> test;
  bool stratified = false;
};

/// Disjoint train/validation/test indices covering 0..N-1, deterministic in
/// the seed. With a 0/1 response, every split must contain >= 2 cases of each
/// class (stratified mode enforces proportional class counts by construction).
SplitAssignment split_three_way(const Dataset& ds, std::uint64_t seed,
                                std::array<double, 3> proportions = {1.0 / 3.0, 1.0 / 3.0,
                                                                     1.0 / 3.0},
                                bool stratified = false);

Dataset subset(const Dataset& ds, const std::vector<int>& indices);

void write_split_csv(const std::string& path, const SplitAssignment& split);

}  // namespace kpcr
