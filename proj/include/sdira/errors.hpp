#pragma once

#include <stdexcept>
#include <string>

namespace sdira {

/// Input outside the mathematical domain of an operation (e.g. delta >= 1/2).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical routine failed to produce a trustworthy answer.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The constraint set of an optimization is empty.
class InfeasibleError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

/// Not enough certified entropy for the requested extraction.
class InsufficientEntropyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A device or source broke its declared contract during a protocol run.
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value failed validation.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace tol {
inline constexpr double kProbability = 1e-12;
inline constexpr double kInequality = 1e-9;
}  // namespace tol

}  // namespace sdira
