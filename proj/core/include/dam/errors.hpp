#pragma once

#include <stdexcept>
#include <string>

namespace dam {

// Bad input: malformed model/policy/cost parameters, unusable grids.
// The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A parameter combination the analytic machinery cannot represent,
// e.g. a bounded-variation model whose ladder ratio is >= 1.
class InfeasibleError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

// An internal accuracy check failed (quadrature inconsistency, series
// that refuses to converge, evaluation past a table's range).
// The CLI maps this to exit code 2.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Analytic-vs-simulation cross-check failed. CLI exit code 3.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace dam
