#include <doctest.h>

#include <Eigen/Dense>

#include "kpcr/errors.hpp"
#include "kpcr/kernel.hpp"
#include "kpcr/rng.hpp"

using namespace kpcr;

namespace {

// The worked 3x5 example used throughout the kernel documentation.
Eigen::MatrixXd toy_matrix() {
  Eigen::MatrixXd X(3, 5);
  X << 1, 2, 3, 2, 0,
       2, 6, 1, 1, 1,
       0, 6, 0, 1, 2;
  return X;
}

// Independent centering route: K - JK/N - KJ/N + JKJ/N^2 spelled out with an
// explicit all-ones matrix.
Eigen::MatrixXd center_by_hand(const Eigen::MatrixXd& K) {
  const auto n = K.rows();
  const Eigen::MatrixXd J = Eigen::MatrixXd::Ones(n, n);
  const double inv = 1.0 / static_cast<double>(n);
  return K - inv * J * K - inv * K * J + inv * inv * J * K * J;
}

Eigen::MatrixXd random_matrix(Rng& rng, int n, int p) {
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
  }
  return X;
}

}  // namespace

TEST_CASE("radial kernel reproduces the worked 3x5 matrix") {
  const Eigen::MatrixXd X = toy_matrix();
  const KernelSpec spec{KernelFamily::radial, 0.01, 1};

  // squared distance between rows 2 and 3 is 6
  CHECK(kernel_value(X.row(1), X.row(2), spec) == doctest::Approx(std::exp(-0.06)));
  CHECK(std::abs(kernel_value(X.row(1), X.row(2), spec) - 0.94) < 0.005);

  const KernelMatrix K = build_kernel_matrix(X, spec);
  Eigen::MatrixXd expected(3, 3);
  expected << 1.00, 0.79, 0.73,
              0.79, 1.00, 0.94,
              0.73, 0.94, 1.00;
  CHECK((K.values - expected).cwiseAbs().maxCoeff() < 0.005);
  for (int i = 0; i < 3; ++i) CHECK(K.values(i, i) == 1.0);
}

TEST_CASE("radial kernel of a point with itself is exactly 1") {
  Eigen::VectorXd x(4);
  x << 0.3, -2.0, 5.5, 1.0;
  CHECK(kernel_value(x, x, {KernelFamily::radial, 0.7, 1}) == 1.0);
}

TEST_CASE("anova kernel reproduces the worked matrix, including the symmetric (1,3) entry") {
  const Eigen::MatrixXd X = toy_matrix();
  const KernelSpec spec{KernelFamily::anova, 0.01, 2};

  Eigen::VectorXd same(5);
  same << 1, 2, 3, 2, 0;
  CHECK(kernel_value(same, same, spec) == 25.0);  // p^d on the diagonal

  CHECK(std::abs(kernel_value(X.row(0), X.row(1), spec) - 22.88) < 0.005);
  CHECK(std::abs(kernel_value(X.row(1), X.row(2), spec) - 24.41) < 0.005);
  // (1,3) is printed asymmetrically in some references; the symmetric value
  // computed from the definition is 22.155.
  CHECK(std::abs(kernel_value(X.row(0), X.row(2), spec) - 22.155) < 0.005);

  const KernelMatrix K = build_kernel_matrix(X, spec);
  CHECK(K.values(0, 2) == K.values(2, 0));
  CHECK(std::abs(K.values(0, 2) - 22.155) < 0.005);
}

TEST_CASE("kernel matrices are exactly symmetric and within family bounds") {
  Rng rng(77);
  const Eigen::MatrixXd X = random_matrix(rng, 12, 4);
  for (const KernelSpec spec :
       {KernelSpec{KernelFamily::radial, 0.5, 1}, KernelSpec{KernelFamily::anova, 0.5, 3}}) {
    const KernelMatrix K = build_kernel_matrix(X, spec);
    CHECK((K.values - K.values.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const double cap =
        spec.family == KernelFamily::radial ? 1.0 : std::pow(4.0, spec.degree);
    for (int i = 0; i < 12; ++i) {
      CHECK(K.values(i, i) == doctest::Approx(cap));
      for (int j = 0; j < 12; ++j) {
        CHECK(K.values(i, j) > 0.0);
        CHECK(K.values(i, j) <= cap + 1e-12);
      }
    }
  }
}

TEST_CASE("kernel matrices are positive semidefinite on random inputs") {
  Rng rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(10));
    const int p = 1 + static_cast<int>(rng.below(5));
    const KernelSpec spec{trial % 2 == 0 ? KernelFamily::radial : KernelFamily::anova,
                          0.05 + 2.0 * rng.uniform01(), 1 + static_cast<int>(rng.below(3))};
    const KernelMatrix K = build_kernel_matrix(random_matrix(rng, n, p), spec);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K.values);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * K.values.trace() / n);
  }
}

TEST_CASE("larger gamma shrinks every off-diagonal entry") {
  const Eigen::MatrixXd X = toy_matrix();
  const KernelMatrix low = build_kernel_matrix(X, {KernelFamily::radial, 0.01, 1});
  const KernelMatrix high = build_kernel_matrix(X, {KernelFamily::radial, 1.0, 1});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(high.values(i, j) < low.values(i, j));
    }
  }
}

TEST_CASE("identical rows give degenerate but valid kernels") {
  Eigen::MatrixXd X(2, 3);
  X << 1, 2, 3,
       1, 2, 3;
  const KernelMatrix K = build_kernel_matrix(X, {KernelFamily::radial, 0.4, 1});
  CHECK((K.values - Eigen::MatrixXd::Ones(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kernel matrices need at least two finite observations") {
  Eigen::MatrixXd one_row(1, 2);
  one_row << 1, 2;
  CHECK_THROWS_AS(build_kernel_matrix(one_row, {KernelFamily::radial, 1.0, 1}),
                  ValidationError);
  Eigen::MatrixXd with_nan(2, 2);
  with_nan << 1, 2, std::numeric_limits<double>::quiet_NaN(), 3;
  CHECK_THROWS_AS(build_kernel_matrix(with_nan, {KernelFamily::radial, 1.0, 1}),
                  ValidationError);
}

TEST_CASE("kernel evaluation rejects bad input") {
  Eigen::VectorXd a(2), b(3);
  a << 1, 2;
  b << 1, 2, 3;
  CHECK_THROWS_AS(kernel_value(a, b, {KernelFamily::radial, 1.0, 1}), ValidationError);
  CHECK_THROWS_AS(kernel_value(a, a, {KernelFamily::radial, -1.0, 1}), ValidationError);
  CHECK_THROWS_AS(kernel_value(a, a, {KernelFamily::radial, 0.0, 1}), ValidationError);
  CHECK_THROWS_AS(kernel_value(a, a, {KernelFamily::anova, 1.0, 0}), ValidationError);
  Eigen::VectorXd bad(2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(kernel_value(a, bad, {KernelFamily::radial, 1.0, 1}), ValidationError);
}

TEST_CASE("double centering: constant matrix collapses to zero") {
  KernelMatrix K;
  K.values = Eigen::MatrixXd::Constant(4, 4, 0.8);
  const CenteredKernel ck = center_kernel_matrix(K);
  CHECK(ck.values.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(ck.stats.grand_mean == doctest::Approx(0.8));
}

TEST_CASE("double centering: 2x2 identity worked example") {
  KernelMatrix K;
  K.values = Eigen::MatrixXd::Identity(2, 2);
  const CenteredKernel ck = center_kernel_matrix(K);
  Eigen::MatrixXd expected(2, 2);
  expected << 0.5, -0.5,
             -0.5, 0.5;
  CHECK((ck.values - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("double centering matches the explicit all-ones-matrix formula") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(12));
    const KernelMatrix K =
        build_kernel_matrix(random_matrix(rng, n, 3), {KernelFamily::anova, 0.3, 2});
    const CenteredKernel ck = center_kernel_matrix(K);
    CHECK((ck.values - center_by_hand(K.values)).cwiseAbs().maxCoeff() < 1e-12);
    // row and column sums vanish
    CHECK(ck.values.rowwise().sum().cwiseAbs().maxCoeff() < 1e-8 * n);
    CHECK(ck.values.colwise().sum().cwiseAbs().maxCoeff() < 1e-8 * n);
    CHECK((ck.values - ck.values.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("double centering is idempotent") {
  Rng rng(32);
  const KernelMatrix K =
      build_kernel_matrix(random_matrix(rng, 9, 2), {KernelFamily::radial, 0.8, 1});
  const CenteredKernel once = center_kernel_matrix(K);
  KernelMatrix recentered;
  recentered.values = once.values;
  const CenteredKernel twice = center_kernel_matrix(recentered);
  CHECK((twice.values - once.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("centering rejects asymmetric input") {
  KernelMatrix K;
  K.values = Eigen::MatrixXd::Identity(3, 3);
  K.values(0, 1) = 0.2;
  CHECK_THROWS_AS(center_kernel_matrix(K), NumericError);
}

TEST_CASE("new-case kernel row reproduces the training centering") {
  Rng rng(55);
  const Eigen::MatrixXd X = random_matrix(rng, 11, 3);
  const KernelSpec spec{KernelFamily::anova, 0.6, 2};
  const CenteredKernel ck = center_kernel_matrix(build_kernel_matrix(X, spec));
  for (int i = 0; i < X.rows(); ++i) {
    const Eigen::VectorXd row = new_point_kernel_row(X.row(i), X, spec, ck.stats);
    CHECK((row.transpose() - ck.values.row(i)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("new-case kernel row on the toy matrix equals the centered row") {
  const Eigen::MatrixXd X = toy_matrix();
  const KernelSpec spec{KernelFamily::radial, 0.01, 1};
  const KernelMatrix K = build_kernel_matrix(X, spec);
  const CenteredKernel ck = center_kernel_matrix(K);
  Eigen::VectorXd x_star(5);
  x_star << 1, 2, 3, 2, 0;  // row 1
  const Eigen::VectorXd row = new_point_kernel_row(x_star, X, spec, ck.stats);
  CHECK((row.transpose() - center_by_hand(K.values).row(0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("new-case kernel row degenerates to zero for constant kernels") {
  Eigen::MatrixXd X(3, 2);
  X << 1, 2,
       1, 2,
       1, 2;
  const KernelSpec spec{KernelFamily::radial, 1.0, 1};
  const CenteredKernel ck = center_kernel_matrix(build_kernel_matrix(X, spec));
  Eigen::VectorXd x_star(2);
  x_star << 1, 2;  // kernel row is constant at the same value as training K
  const Eigen::VectorXd row = new_point_kernel_row(x_star, X, spec, ck.stats);
  CHECK(row.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("new-case kernel row rejects dimension mismatch") {
  const Eigen::MatrixXd X = toy_matrix();
  const KernelSpec spec{KernelFamily::radial, 0.01, 1};
  const CenteredKernel ck = center_kernel_matrix(build_kernel_matrix(X, spec));
  Eigen::VectorXd wrong(3);
  wrong << 1, 2, 3;
  CHECK_THROWS_AS(new_point_kernel_row(wrong, X, spec, ck.stats), ValidationError);
}
