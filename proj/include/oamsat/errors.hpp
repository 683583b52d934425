#pragma once

#include <stdexcept>
#include <string>

namespace oamsat {

/// Malformed or incomplete configuration input (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physically invalid parameter set, e.g. H <= h0 or a zenith angle
/// outside the weak-turbulence range (CLI exit code 3).
class ValidityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Quadrature non-convergence, grid under-resolution and similar
/// numerical breakdowns (CLI exit code 4).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-system failure while reading inputs or writing results.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oamsat
