#pragma once

#include <stdexcept>
#include <string>

namespace aggfw {

// Inconsistent user configuration or malformed input. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values, a broken oracle, or a solver that failed to converge.
// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aggfw
