#include "twistecho/workspace.hpp"

#include <map>

#include "twistecho/errors.hpp"

namespace twistecho {

SpinWorkspace::SpinWorkspace(SpinSystem system)
    : system_(system),
      jx_(build_spin_operator(system, SpinComponent::X)),
      jy_(build_spin_operator(system, SpinComponent::Y)),
      jz_(build_spin_operator(system, SpinComponent::Z)),
      tact_(build_twisting_hamiltonian(system, Twisting::TACT)),
      oat_(build_twisting_hamiltonian(system, Twisting::OAT)) {}

std::shared_ptr<const SpinWorkspace> SpinWorkspace::shared(int n_atoms) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const SpinWorkspace>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n_atoms];
  if (!slot) slot = std::make_shared<const SpinWorkspace>(SpinSystem(n_atoms));
  return slot;
}

const Propagator& SpinWorkspace::lazy(Slot slot, const BandedOperator& op) const {
  std::call_once(once_[slot], [&] { propagators_[slot] = std::make_unique<Propagator>(op); });
  return *propagators_[slot];
}

const Propagator& SpinWorkspace::propagator(Axis axis) const {
  switch (axis) {
    case Axis::X:
      return lazy(kX, jx_);
    case Axis::Y:
      return lazy(kY, jy_);
    case Axis::Z:
      break;
  }
  throw ContractViolation("SpinWorkspace::propagator: z rotations are diagonal, use rotate()");
}

const Propagator& SpinWorkspace::twisting_propagator(Twisting kind) const {
  return kind == Twisting::TACT ? lazy(kTact, tact_) : lazy(kOat, oat_);
}

Eigen::VectorXcd SpinWorkspace::rotate(const Eigen::VectorXcd& v, Axis axis, double angle) const {
  if (v.size() != system_.dim()) throw StructuralError("SpinWorkspace::rotate: dimension mismatch");
  if (angle == 0.0) return v;
  if (axis == Axis::Z) {
    Eigen::VectorXcd out = v;
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] *= std::polar(1.0, -angle * system_.m(i));
    return out;
  }
  return propagator(axis).apply(v, angle);
}

DickeState SpinWorkspace::rotate(const DickeState& state, Axis axis, double angle) const {
  return DickeState(system_, rotate(state.amplitudes(), axis, angle));
}

Eigen::VectorXcd SpinWorkspace::twist(const Eigen::VectorXcd& v, Twisting kind, double t_chi) const {
  if (t_chi == 0.0) return v;
  return twisting_propagator(kind).apply(v, t_chi);
}

DickeState SpinWorkspace::twist(const DickeState& state, Twisting kind, double t_chi) const {
  return DickeState(system_, twist(state.amplitudes(), kind, t_chi));
}

}  // namespace twistecho
