#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

/// Invalid or inconsistent user input (config files, parameter paths, domain
/// violations such as g1 >= g2 in the adiabatic model).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Drift matrix has no stable steady state; solving is refused.
class InstabilityError : public std::runtime_error {
 public:
  explicit InstabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: non-convergence, singular systems, divergent integration.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cascade
