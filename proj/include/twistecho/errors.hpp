#pragma once

#include <stdexcept>
#include <string>

namespace twistecho {

/// Shape or dimension mismatch between states and operators.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller broke an operation precondition (e.g. smearing with sigma = 0).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The signal a ratio is taken against vanishes.
class UndefinedSignalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A quantity needs nonzero spread or polarization and the state has none.
class DegenerateStateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Closed-form one-mode expressions overflow outside their validity window.
class OutOfWindowError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, double achievable_db)
      : std::runtime_error(what), achievable_db_(achievable_db) {}

  /// Deepest squeezing (dB) found on the scanned branch.
  double achievable_db() const noexcept { return achievable_db_; }

 private:
  double achievable_db_;
};

}  // namespace twistecho
