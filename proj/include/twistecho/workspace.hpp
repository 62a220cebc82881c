#pragma once

#include <array>
#include <memory>
#include <mutex>

#include "twistecho/propagator.hpp"
#include "twistecho/spin_operators.hpp"

namespace twistecho {

/// Lazily built operators and propagators for one SpinSystem.
///
/// Each propagator is diagonalized on first use (thread-safe) and never
/// changes afterwards, so one workspace can serve many concurrent sweep
/// points. `shared()` hands out a process-wide instance per N.
class SpinWorkspace {
 public:
  explicit SpinWorkspace(SpinSystem system);
  SpinWorkspace(const SpinWorkspace&) = delete;
  SpinWorkspace& operator=(const SpinWorkspace&) = delete;

  static std::shared_ptr<const SpinWorkspace> shared(int n_atoms);

  const SpinSystem& system() const noexcept { return system_; }

  const BandedOperator& jx() const noexcept { return jx_; }
  const BandedOperator& jy() const noexcept { return jy_; }
  const BandedOperator& jz() const noexcept { return jz_; }
  const BandedOperator& twisting(Twisting kind) const noexcept {
    return kind == Twisting::TACT ? tact_ : oat_;
  }

  const Propagator& propagator(Axis axis) const;
  const Propagator& twisting_propagator(Twisting kind) const;

  /// exp(-i angle J_axis) on a raw amplitude vector.
  Eigen::VectorXcd rotate(const Eigen::VectorXcd& v, Axis axis, double angle) const;
  DickeState rotate(const DickeState& state, Axis axis, double angle) const;
  /// exp(-i t_chi H_kind); negative t_chi runs the dynamics backwards.
  Eigen::VectorXcd twist(const Eigen::VectorXcd& v, Twisting kind, double t_chi) const;
  DickeState twist(const DickeState& state, Twisting kind, double t_chi) const;

 private:
  enum Slot { kX, kY, kTact, kOat, kSlots };
  const Propagator& lazy(Slot slot, const BandedOperator& op) const;

  SpinSystem system_;
  BandedOperator jx_, jy_, jz_, tact_, oat_;
  mutable std::array<std::once_flag, kSlots> once_;
  mutable std::array<std::unique_ptr<Propagator>, kSlots> propagators_;
};

}  // namespace twistecho
