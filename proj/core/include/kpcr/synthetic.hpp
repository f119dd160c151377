#pragma once

#include <cstdint>
#include <string>

#include "kpcr/dataset.hpp"

namespace kpcr {

enum class SyntheticKind { regression1d, nonlinear_binary };

SyntheticKind synthetic_kind_from_string(const std::string& name);

/// Noiseless target of the 1-D regression generator: sin(2.5 x) * x.
double regression1d_mean(double x);

/// Desk-scale generators, pure in (kind, n, seed, noise_scale).
///
/// regression1d: x uniform on [-3, 3], y = sin(2.5 x) * x + noise_scale * N(0,1).
/// nonlinear_binary: (x1, x2) uniform on [-2, 2]^2, label 1 inside the circle
/// x1^2 + x2^2 < 2.4 (positive rate ~0.47), labels flipped with probability
/// noise_scale. Not separable by any line once both sides of the ring are
/// populated.
Dataset generate_synthetic(SyntheticKind kind, int n, std::uint64_t seed, double noise_scale);

}  // namespace kpcr
