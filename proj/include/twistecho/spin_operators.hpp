#pragma once

#include "twistecho/banded_operator.hpp"

namespace twistecho {

enum class SpinComponent { X, Y, Z, Plus, Minus };

enum class Twisting {
  /// Two-axis countertwisting, -(J_x J_y + J_y J_x).
  TACT,
  /// One-axis twisting about x, J_x^2.
  OAT,
};

/// Twisting kind together with the dimensionless strength t*chi.
struct TwistingParams {
  Twisting kind = Twisting::TACT;
  double t_chi = 0.0;

  /// Throws ContractViolation for negative or non-finite t_chi.
  void validate() const;
};

/// Collective spin operator in the descending-m Dicke basis. J_+ and J_- are
/// not Hermitian; everything else is.
BandedOperator build_spin_operator(const SpinSystem& system, SpinComponent which);

/// Twisting Hamiltonian with chi factored out. Occupies bands {0, +-2}.
BandedOperator build_twisting_hamiltonian(const SpinSystem& system, Twisting kind);

const char* to_string(Twisting kind) noexcept;

}  // namespace twistecho
