#pragma once

#include <complex>

#include <Eigen/Dense>

namespace twistecho {

using Complex = std::complex<double>;

/// Symmetric two-mode ensemble of N atoms, i.e. a spin j = N/2.
///
/// The Dicke basis is ordered by descending J_z eigenvalue: index 0 is
/// m = +N/2 (all atoms in mode a), index N is m = -N/2. Every operator and
/// state in the library uses this ordering.
class SpinSystem {
 public:
  explicit SpinSystem(int n_atoms);

  int n_atoms() const noexcept { return n_atoms_; }
  /// 2j, kept as an integer so half-integer spins stay exact.
  int two_j() const noexcept { return n_atoms_; }
  double j() const noexcept { return 0.5 * n_atoms_; }
  Eigen::Index dim() const noexcept { return n_atoms_ + 1; }

  /// J_z eigenvalue of basis index i.
  double m(Eigen::Index i) const noexcept { return 0.5 * static_cast<double>(n_atoms_ - 2 * i); }

  /// All J_z eigenvalues in basis order.
  Eigen::VectorXd eigenvalues() const;

  bool operator==(const SpinSystem&) const = default;

 private:
  int n_atoms_;
};

class DickeState {
 public:
  /// Wraps amplitudes as given; they are not renormalized.
  DickeState(SpinSystem system, Eigen::VectorXcd amplitudes);

  /// Coherent spin state polarized along +J_z.
  static DickeState pole(SpinSystem system);
  /// Coherent spin state with amplitudes
  /// sqrt(C(N,k)) cos(polar/2)^{N-k} sin(polar/2)^k e^{-ik azimuth}.
  /// With this phase convention the mean spin sits at polar angle `polar`
  /// and physical azimuth -`azimuth`, i.e. R_z(-azimuth) R_y(polar)|pole>.
  static DickeState coherent(SpinSystem system, double polar, double azimuth);
  /// The J_z eigenstate at basis index `index`.
  static DickeState basis(SpinSystem system, Eigen::Index index);

  const SpinSystem& system() const noexcept { return system_; }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }

  double norm() const { return amplitudes_.norm(); }
  /// <this|other>.
  Complex overlap(const DickeState& other) const;
  /// |<this|other>|^2.
  double fidelity(const DickeState& other) const;

 private:
  SpinSystem system_;
  Eigen::VectorXcd amplitudes_;
};

/// Amplitude magnitudes sqrt(C(N,k)) cos(polar/2)^{N-k} sin(polar/2)^k of a
/// coherent spin state, evaluated in log space so large N does not overflow.
Eigen::VectorXd coherent_magnitudes(int n_atoms, double polar);

}  // namespace twistecho
