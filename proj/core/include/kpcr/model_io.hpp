#pragma once

#include <string>

#include "kpcr/forecaster.hpp"

namespace kpcr {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON with an embedded checksum over the payload; written
/// atomically (temp + rename). Doubles are serialized at round-trip precision
/// so load(save(f)) scores identically.
void save_model(const FittedForecaster& forecaster, const std::string& path);

/// Throws NumericError on checksum/parse failure, ValidationError on an
/// unsupported version. Never returns a partial model.
FittedForecaster load_model(const std::string& path);

}  // namespace kpcr
