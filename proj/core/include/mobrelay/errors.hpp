#pragma once

#include <stdexcept>

namespace mobrelay {

// Sequence lengths do not agree with each other or with the slot count.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of the operation (negative power, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller-checked structural precondition violated (e.g. non-monotone channels).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Iterative solver lost positive-definiteness, stalled, or produced non-finite values.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Convex program has no strictly feasible point.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Primal recovery found a dual point inconsistent with the detected case.
class CaseInconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mobrelay
