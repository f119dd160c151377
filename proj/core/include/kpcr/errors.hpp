#pragma once

#include <stdexcept>
#include <string>

namespace kpcr {

/// Bad inputs, schemas, or configuration. CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure (non-PSD kernel, singular solve, corrupt model file). CLI exit code 2.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Grid selection found no admissible candidate. CLI exit code 3.
class SelectionError : public std::runtime_error {
 public:
  explicit SelectionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kpcr
