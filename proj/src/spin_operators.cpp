#include "twistecho/spin_operators.hpp"

#include <cmath>

#include "twistecho/errors.hpp"

namespace twistecho {

void TwistingParams::validate() const {
  if (!std::isfinite(t_chi) || t_chi < 0.0) {
    throw ContractViolation("t_chi must be finite and non-negative");
  }
}

namespace {

// J_+ |j, m> = sqrt(j(j+1) - m(m+1)) |j, m+1>. In the descending basis the
// target sits one row above the source, i.e. band -1.
Eigen::VectorXcd raising_band(const SpinSystem& system) {
  const Eigen::Index n = system.dim();
  Eigen::VectorXcd band(n - 1);
  const double j = system.j();
  for (Eigen::Index t = 0; t < n - 1; ++t) {
    const double m = system.m(t + 1);
    band[t] = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  return band;
}

}  // namespace

BandedOperator build_spin_operator(const SpinSystem& system, SpinComponent which) {
  BandedOperator op(system);
  if (which == SpinComponent::Z) {
    op.set_band(0, system.eigenvalues().cast<Complex>());
    return op;
  }
  if (system.dim() < 2) return op;
  const Eigen::VectorXcd ladder = raising_band(system);
  switch (which) {
    case SpinComponent::Plus:
      op.set_band(-1, ladder);
      break;
    case SpinComponent::Minus:
      op.set_band(1, ladder);
      break;
    case SpinComponent::X:
      op.set_band(-1, 0.5 * ladder);
      op.set_band(1, 0.5 * ladder);
      break;
    case SpinComponent::Y:
      // (J_+ - J_-) / 2i
      op.set_band(-1, ladder * Complex(0.0, -0.5));
      op.set_band(1, ladder * Complex(0.0, 0.5));
      break;
    case SpinComponent::Z:
      break;
  }
  return op;
}

BandedOperator build_twisting_hamiltonian(const SpinSystem& system, Twisting kind) {
  if (kind == Twisting::OAT) {
    const BandedOperator jx = build_spin_operator(system, SpinComponent::X);
    return (jx * jx).pruned();
  }
  const BandedOperator jp = build_spin_operator(system, SpinComponent::Plus);
  const BandedOperator jm = build_spin_operator(system, SpinComponent::Minus);
  // -(J_+^2 - J_-^2) / 2i = (i/2)(J_+^2 - J_-^2)
  return (Complex(0.0, 0.5) * (jp * jp - jm * jm)).pruned();
}

const char* to_string(Twisting kind) noexcept { return kind == Twisting::TACT ? "TACT" : "OAT"; }

}  // namespace twistecho
