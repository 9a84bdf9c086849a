#pragma once

#include <stdexcept>
#include <string>

namespace odf {

/// Raised when numerical evaluation leaves the finite range.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No prompt in a full pass over the pool satisfied the filter.
class PoolExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace odf
