#pragma once

#include <stdexcept>
#include <string>

namespace misvqa {

/// Bad argument: out-of-range probability, length mismatch, wrong dimensions.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input exceeds what an exact routine is willing to handle.
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// A bitstring that was required to be an independent set is not one.
class FeasibilityError : public std::invalid_argument {
 public:
  explicit FeasibilityError(const std::string& what) : std::invalid_argument(what) {}
};

/// Approximation ratio requested against an empty maximum.
class UndefinedRatioError : public std::domain_error {
 public:
  explicit UndefinedRatioError(const std::string& what) : std::domain_error(what) {}
};

/// Configuration file or flag combination could not be turned into a run.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace misvqa
