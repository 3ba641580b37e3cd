#pragma once

#include <stdexcept>
#include <string>

namespace pilinv {

/// Invalid model parameter (nonpositive mean, r >= mu, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller broke a precondition of a pure function (negative order, length mismatch).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Incompatible combination of components, e.g. a lattice projection on continuous demand.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mathematical domain violation (zero-variance demand where a positive one is needed).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A truncated distribution dropped more mass than allowed.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double tail_mass)
      : std::runtime_error(what + " (tail mass " + std::to_string(tail_mass) + ")"),
        tail_mass_(tail_mass) {}
  double tail_mass() const noexcept { return tail_mass_; }

 private:
  double tail_mass_;
};

/// A computation outgrew its configured memory or support cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pilinv
