#pragma once

#include <stdexcept>
#include <string>

namespace exset {

/// Invalid argument shapes, mismatched dimensions, precondition violations.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure that survives all recovery attempts (e.g. a covariance
/// matrix that is not factorizable even after jitter escalation).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// A requested allocation exceeds a configured cap.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// Conditioning on a point whose conditional variance is already ~0.
class DegenerateUpdateError : public NumericError {
 public:
  explicit DegenerateUpdateError(const std::string& what) : NumericError(what) {}
};

/// Malformed configuration file or invalid option value.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace exset
