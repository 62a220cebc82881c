#include "twistecho/dicke.hpp"

#include <cmath>
#include <string>

#include "twistecho/errors.hpp"

namespace twistecho {

SpinSystem::SpinSystem(int n_atoms) : n_atoms_(n_atoms) {
  if (n_atoms < 1) {
    throw StructuralError("SpinSystem needs at least one atom, got " + std::to_string(n_atoms));
  }
}

Eigen::VectorXd SpinSystem::eigenvalues() const {
  Eigen::VectorXd mu(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) mu[i] = m(i);
  return mu;
}

DickeState::DickeState(SpinSystem system, Eigen::VectorXcd amplitudes)
    : system_(system), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != system_.dim()) {
    throw StructuralError("DickeState: amplitude vector has length " +
                          std::to_string(amplitudes_.size()) + ", expected " +
                          std::to_string(system_.dim()));
  }
}

DickeState DickeState::pole(SpinSystem system) { return basis(system, 0); }

DickeState DickeState::basis(SpinSystem system, Eigen::Index index) {
  if (index < 0 || index >= system.dim()) {
    throw StructuralError("DickeState::basis: index out of range");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(system.dim());
  v[index] = 1.0;
  return DickeState(system, std::move(v));
}

Eigen::VectorXd coherent_magnitudes(int n_atoms, double polar) {
  const double c = std::cos(0.5 * polar);
  const double s = std::sin(0.5 * polar);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_atoms + 1);
  const double log_c = std::log(std::abs(c));
  const double log_s = std::log(std::abs(s));
  const double lg_n = std::lgamma(n_atoms + 1.0);
  for (int k = 0; k <= n_atoms; ++k) {
    const int nk = n_atoms - k;
    // 0^0 = 1 at the poles.
    if ((nk > 0 && c == 0.0) || (k > 0 && s == 0.0)) continue;
    double log_mag = 0.5 * (lg_n - std::lgamma(k + 1.0) - std::lgamma(nk + 1.0));
    if (nk > 0) log_mag += nk * log_c;
    if (k > 0) log_mag += k * log_s;
    double mag = std::exp(log_mag);
    if ((c < 0 && (nk % 2)) != (s < 0 && (k % 2))) mag = -mag;
    out[k] = mag;
  }
  return out;
}

DickeState DickeState::coherent(SpinSystem system, double polar, double azimuth) {
  const Eigen::VectorXd mag = coherent_magnitudes(system.n_atoms(), polar);
  Eigen::VectorXcd v(system.dim());
  for (Eigen::Index k = 0; k < system.dim(); ++k) {
    v[k] = mag[k] * std::polar(1.0, -static_cast<double>(k) * azimuth);
  }
  return DickeState(system, std::move(v));
}

Complex DickeState::overlap(const DickeState& other) const {
  if (!(system_ == other.system_)) throw StructuralError("overlap: spin systems differ");
  return amplitudes_.dot(other.amplitudes_);
}

double DickeState::fidelity(const DickeState& other) const { return std::norm(overlap(other)); }

}  // namespace twistecho
