#pragma once

#include <Eigen/Core>

#include <string>

namespace kpcr {

enum class KernelFamily { radial, anova };

KernelFamily kernel_family_from_string(const std::string& name);
std::string to_string(KernelFamily family);

struct KernelSpec {
  KernelFamily family = KernelFamily::radial;
  double gamma = 1.0;  // scale, > 0
  int degree = 1;      // anova only; >= 1

  void validate() const;
  /// e.g. "anova(gamma=0.1, d=2)"
  std::string name() const;
};

/// radial: exp(-gamma * ||x - x'||^2)
/// anova:  (sum_j exp(-gamma * (x_j - x'_j)^2))^d
double kernel_value(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                    const KernelSpec& spec);

struct KernelMatrix {
  Eigen::MatrixXd values;  // N x N, symmetric by construction
  KernelSpec spec;
};

/// Pairwise kernel matrix over the rows of X; only i <= j evaluated, mirrored.
KernelMatrix build_kernel_matrix(const Eigen::MatrixXd& X, const KernelSpec& spec);

/// Training column means of K and its grand mean; these are what a new case
/// needs to be centered consistently with the training matrix.
struct KernelCenteringStats {
  Eigen::VectorXd column_means;  // length N
  double grand_mean = 0.0;
};

struct CenteredKernel {
  Eigen::MatrixXd values;  // K_tilde, rows and columns sum to 0
  KernelCenteringStats stats;
};

/// K_tilde = K - (1/N) J K - (1/N) K J + (1/N^2) J K J, J the all-ones matrix.
CenteredKernel center_kernel_matrix(const KernelMatrix& kernel);

/// Kernel row of a new (already standardized) case against the training rows,
/// centered so that a training row pushed through here reproduces its row of
/// K_tilde: k_tilde*_j = k*_j - mean(k*) - colmean_j(K) + grandmean(K).
Eigen::VectorXd new_point_kernel_row(const Eigen::VectorXd& x_star,
                                     const Eigen::MatrixXd& X_train, const KernelSpec& spec,
                                     const KernelCenteringStats& stats);

/// Full-precision CSV dumps for debugging.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& values);

}  // namespace kpcr
