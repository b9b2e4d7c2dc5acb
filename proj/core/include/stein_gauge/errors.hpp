#pragma once

#include <stdexcept>
#include <string>

namespace stein_gauge {

/// Caller supplied something outside an operation's preconditions
/// (dimension mismatch, non-positive weight, malformed file, ...).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A run configuration that cannot be honored, e.g. an unstable step size
/// or a horizon too short for the requested truncation tolerance.
class ConfigError : public InputError {
 public:
  explicit ConfigError(const std::string& what) : InputError(what) {}
};

/// Non-finite values produced or consumed during a computation.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

[[noreturn]] void throw_input(const std::string& where, const std::string& what);
[[noreturn]] void throw_numeric(const std::string& where, const std::string& what);

inline void require(bool ok, const char* where, const std::string& what) {
  if (!ok) throw_input(where, what);
}

}  // namespace detail
}  // namespace stein_gauge
