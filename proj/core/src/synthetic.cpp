#include "kpcr/synthetic.hpp"

#include <cmath>

#include "kpcr/errors.hpp"
#include "kpcr/rng.hpp"

namespace kpcr {

SyntheticKind synthetic_kind_from_string(const std::string& name) {
  if (name == "regression1d") return SyntheticKind::regression1d;
  if (name == "nonlinear_binary") return SyntheticKind::nonlinear_binary;
  throw ValidationError("unknown synthetic kind '" + name +
                        "' (expected regression1d or nonlinear_binary)");
}

double regression1d_mean(double x) { return std::sin(2.5 * x) * x; }

Dataset generate_synthetic(SyntheticKind kind, int n, std::uint64_t seed, double noise_scale) {
  if (n < 20) throw ValidationError("synthetic datasets need n >= 20");
  if (noise_scale < 0.0) throw ValidationError("noise_scale must be >= 0");

  Rng rng(seed);
  Dataset ds;
  switch (kind) {
    case SyntheticKind::regression1d: {
      ds.feature_names = {"x"};
      ds.X.resize(n, 1);
      ds.y.resize(n);
      // All predictors first, then all noise draws, so the noiseless dataset
      // shares its x grid with any noisy one at the same seed.
      for (int i = 0; i < n; ++i) ds.X(i, 0) = rng.uniform(-3.0, 3.0);
      for (int i = 0; i < n; ++i) {
        ds.y[i] = regression1d_mean(ds.X(i, 0)) + noise_scale * rng.normal();
      }
      break;
    }
    case SyntheticKind::nonlinear_binary: {
      if (noise_scale >= 0.5) {
        throw ValidationError("label-flip probability must be < 0.5");
      }
      ds.feature_names = {"x1", "x2"};
      ds.X.resize(n, 2);
      ds.y.resize(n);
      for (int i = 0; i < n; ++i) {
        ds.X(i, 0) = rng.uniform(-2.0, 2.0);
        ds.X(i, 1) = rng.uniform(-2.0, 2.0);
      }
      for (int i = 0; i < n; ++i) {
        const double r2 = ds.X(i, 0) * ds.X(i, 0) + ds.X(i, 1) * ds.X(i, 1);
        int label = r2 < 2.4 ? 1 : 0;
        if (rng.uniform01() < noise_scale) label = 1 - label;
        ds.y[i] = label;
      }
      break;
    }
  }
  return ds;
}

}  // namespace kpcr
