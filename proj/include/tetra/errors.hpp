#pragma once

#include <stdexcept>
#include <string>

namespace tetra {

/// Precondition or input-range violation (nonpositive mass, asymmetric Gamma, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver failed to converge. Carries the best residual reached.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what + " (best residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A kernel was evaluated at its singular point.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested accuracy is not reachable within the configured truncation.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tetra
