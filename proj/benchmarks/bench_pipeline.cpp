#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "kpcr/glm.hpp"
#include "kpcr/kernel.hpp"
#include "kpcr/kpca.hpp"
#include "kpcr/rng.hpp"
#include "kpcr/synthetic.hpp"

namespace {

Eigen::MatrixXd random_matrix(int n, int p, std::uint64_t seed) {
  kpcr::Rng rng(seed);
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
  }
  return X;
}

void BM_KernelMatrixRadial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd X = random_matrix(n, 2, 1);
  const kpcr::KernelSpec spec{kpcr::KernelFamily::radial, 3.0, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(kpcr::build_kernel_matrix(X, spec));
  }
  state.SetItemsProcessed(state.iterations() * n * (n + 1) / 2);
}

void BM_KernelMatrixAnova(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd X = random_matrix(n, 2, 1);
  const kpcr::KernelSpec spec{kpcr::KernelFamily::anova, 3.0, 3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(kpcr::build_kernel_matrix(X, spec));
  }
  state.SetItemsProcessed(state.iterations() * n * (n + 1) / 2);
}

void BM_CenterAndEigendecompose(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const kpcr::KernelMatrix K = kpcr::build_kernel_matrix(
      random_matrix(n, 2, 2), {kpcr::KernelFamily::anova, 3.0, 2});
  for (auto _ : state) {
    const kpcr::CenteredKernel ck = kpcr::center_kernel_matrix(K);
    benchmark::DoNotOptimize(kpcr::eigendecompose(ck));
  }
}

void BM_WeightedLogisticIrls(benchmark::State& state) {
  const int n = 500;
  const int r = static_cast<int>(state.range(0));
  const kpcr::Dataset ds =
      kpcr::generate_synthetic(kpcr::SyntheticKind::nonlinear_binary, n, 3, 0.1);
  const kpcr::CenteredKernel ck = kpcr::center_kernel_matrix(
      kpcr::build_kernel_matrix(ds.X, {kpcr::KernelFamily::anova, 3.0, 2}));
  const kpcr::KpcBasis basis = kpcr::eigendecompose(ck);
  const kpcr::PcRegressors pcs = kpcr::project_training(ck, basis, r);
  const Eigen::VectorXd w = kpcr::cost_weights(ds.y, {2.0, 1.0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(kpcr::fit_weighted_logistic(pcs.scores, ds.y, w));
  }
}

void BM_NewCaseScoringPath(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd X = random_matrix(n, 2, 4);
  const kpcr::KernelSpec spec{kpcr::KernelFamily::anova, 3.0, 2};
  const kpcr::CenteredKernel ck = kpcr::center_kernel_matrix(kpcr::build_kernel_matrix(X, spec));
  const kpcr::KpcBasis basis = kpcr::eigendecompose(ck);
  const int r = kpcr::select_rank(basis, 0.9);
  Eigen::VectorXd x_star(2);
  x_star << 0.3, -0.7;
  for (auto _ : state) {
    const Eigen::VectorXd row = kpcr::new_point_kernel_row(x_star, X, spec, ck.stats);
    benchmark::DoNotOptimize(kpcr::project_new(row, basis, r));
  }
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_KernelMatrixRadial)->Arg(100)->Arg(300)->Arg(500);
BENCHMARK(BM_KernelMatrixAnova)->Arg(100)->Arg(300)->Arg(500);
BENCHMARK(BM_CenterAndEigendecompose)->Arg(100)->Arg(300)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightedLogisticIrls)->Arg(10)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NewCaseScoringPath)->Arg(100)->Arg(500);

BENCHMARK_MAIN();
