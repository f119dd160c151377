#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kpcr/errors.hpp"
#include "kpcr/model_io.hpp"
#include "kpcr/rng.hpp"
#include "kpcr/selection.hpp"
#include "kpcr/synthetic.hpp"

using namespace kpcr;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

FittedForecaster trained_forecaster(std::uint64_t seed) {
  const Dataset full = generate_synthetic(SyntheticKind::nonlinear_binary, 150, seed, 0.1);
  const SplitAssignment split = split_three_way(full, seed);
  auto [train_z, params] = standardize(subset(full, split.train));
  return fit_forecaster(train_z, params, {KernelFamily::anova, 3.0, 2}, 0.8, {2.0, 1.0});
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("save/load round trip scores identically") {
  const FittedForecaster original = trained_forecaster(41);
  TempFile file("roundtrip_model.json");
  save_model(original, file.path);
  const FittedForecaster loaded = load_model(file.path);

  CHECK(loaded.rank() == original.rank());
  CHECK(loaded.kernel.gamma == original.kernel.gamma);
  CHECK(loaded.threshold == original.threshold);

  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd raw(2);
    raw << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0);
    const Prediction a = original.score_raw(raw, {"x1", "x2"});
    const Prediction b = loaded.score_raw(raw, {"x1", "x2"});
    CHECK(std::abs(a.probability - b.probability) <= 1e-12);
    CHECK(a.label == b.label);
  }
}

TEST_CASE("a truncated model file is rejected without a partial model") {
  const FittedForecaster original = trained_forecaster(42);
  TempFile file("truncated_model.json");
  save_model(original, file.path);
  const std::string full = slurp(file.path);
  {
    std::ofstream out(file.path, std::ios::binary | std::ios::trunc);
    out << full.substr(0, full.size() / 2);
  }
  CHECK_THROWS_AS(load_model(file.path), NumericError);
}

TEST_CASE("a single flipped digit trips the checksum") {
  const FittedForecaster original = trained_forecaster(43);
  TempFile file("corrupt_model.json");
  save_model(original, file.path);
  std::string text = slurp(file.path);
  // Flip one digit inside the payload (after the checksum field, which sits
  // near the top of the envelope).
  const std::size_t payload = text.find("\"model\"");
  REQUIRE(payload != std::string::npos);
  const std::size_t digit = text.find_first_of("123456789", payload);
  REQUIRE(digit != std::string::npos);
  text[digit] = text[digit] == '7' ? '8' : '7';
  {
    std::ofstream out(file.path, std::ios::binary | std::ios::trunc);
    out << text;
  }
  try {
    load_model(file.path);
    FAIL("expected a checksum failure");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("checksum") != std::string::npos);
  }
}

TEST_CASE("unsupported format versions are refused with a clear message") {
  const FittedForecaster original = trained_forecaster(44);
  TempFile file("versioned_model.json");
  save_model(original, file.path);
  std::string text = slurp(file.path);
  const std::size_t where = text.find("\"version\": 1");
  REQUIRE(where != std::string::npos);
  text.replace(where, std::string("\"version\": 1").size(), "\"version\": 99");
  {
    std::ofstream out(file.path, std::ios::binary | std::ios::trunc);
    out << text;
  }
  try {
    load_model(file.path);
    FAIL("expected a version rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }
}

TEST_CASE("a model saved at rank r loads a basis with exactly r columns") {
  const Dataset full = generate_synthetic(SyntheticKind::nonlinear_binary, 120, 45, 0.1);
  const SplitAssignment split = split_three_way(full, 45);
  auto [train_z, params] = standardize(subset(full, split.train));
  const CenteredKernel ck =
      center_kernel_matrix(build_kernel_matrix(train_z.X, {KernelFamily::anova, 3.0, 2}));
  const int r = select_rank(eigendecompose(ck), 0.6);

  const FittedForecaster f =
      fit_forecaster(train_z, params, {KernelFamily::anova, 3.0, 2}, 0.6, {2.0, 1.0});
  REQUIRE(f.rank() == r);
  TempFile file("rank_model.json");
  save_model(f, file.path);
  const FittedForecaster loaded = load_model(file.path);
  CHECK(loaded.basis.cols() == r);
  CHECK(loaded.eigenvalues.size() == r);
  CHECK(loaded.glm.coefficients.size() == r + 1);
}

TEST_CASE("a resubmitted training case reproduces its in-sample fitted value") {
  const Dataset full = generate_synthetic(SyntheticKind::nonlinear_binary, 150, 46, 0.1);
  const SplitAssignment split = split_three_way(full, 46);
  const Dataset train = subset(full, split.train);
  auto [train_z, params] = standardize(train);
  const FittedForecaster f =
      fit_forecaster(train_z, params, {KernelFamily::anova, 3.0, 2}, 0.8, {2.0, 1.0});

  // In-sample fitted values via the training projection.
  const CenteredKernel ck = center_kernel_matrix(build_kernel_matrix(train_z.X, f.kernel));
  const KpcBasis basis = eigendecompose(ck);
  const PcRegressors pcs = project_training(ck, basis, f.rank());
  const Eigen::VectorXd in_sample = fitted_values(f.glm, pcs.scores);

  for (Eigen::Index i = 0; i < train.n(); ++i) {
    const Prediction via_raw = f.score_raw(train.X.row(i), train.feature_names);
    CHECK(std::abs(via_raw.probability - in_sample[i]) < 1e-8);
  }
}

TEST_CASE("nonexistent files and wrong-format files fail cleanly") {
  CHECK_THROWS_AS(load_model("does_not_exist.json"), ValidationError);
  TempFile file("not_a_model.json");
  {
    std::ofstream out(file.path);
    out << "{\"hello\": 1}";
  }
  CHECK_THROWS_AS(load_model(file.path), ValidationError);
  TempFile garbage("garbage_model.json");
  {
    std::ofstream out(garbage.path);
    out << "this is not json";
  }
  CHECK_THROWS_AS(load_model(garbage.path), NumericError);
}
