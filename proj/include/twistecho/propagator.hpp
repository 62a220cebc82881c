#pragma once

#include <vector>

#include <Eigen/Dense>

#include "twistecho/banded_operator.hpp"
#include "twistecho/dicke.hpp"
#include "twistecho/krylov.hpp"

namespace twistecho {

enum class PropagationMethod {
  /// Spectral up to kSpectralDimLimit, Krylov above.
  Automatic,
  Spectral,
  Krylov,
};

inline constexpr Eigen::Index kSpectralDimLimit = 4097;

/// Applies exp(-i * scale * H) for a fixed Hermitian banded H.
///
/// The spectral path diagonalizes H once. When H only couples sites a fixed
/// distance b apart (bands {0, +-b}), it splits into b tridiagonal chains;
/// each chain is gauged to a real symmetric tridiagonal matrix and solved
/// with the tridiagonal QR solver. Any other band pattern falls back to a
/// dense complex eigensolver. The Krylov path never forms a matrix.
///
/// Immutable after construction; apply() is safe to call concurrently.
class Propagator {
 public:
  explicit Propagator(BandedOperator h, PropagationMethod method = PropagationMethod::Automatic,
                      KrylovOptions krylov = {});

  const BandedOperator& hamiltonian() const noexcept { return h_; }
  /// Spectral or Krylov, never Automatic.
  PropagationMethod method() const noexcept { return method_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v, double scale) const;
  DickeState apply(const DickeState& state, double scale) const;

  /// Eigenvalues of H, ascending. Spectral path only.
  Eigen::VectorXd eigenvalues() const;

 private:
  struct Chain {
    std::vector<Eigen::Index> sites;
    Eigen::VectorXcd gauge;    // H restricted to the chain = G T G^dagger
    Eigen::MatrixXd vectors;   // eigenvectors of the real tridiagonal T
    Eigen::VectorXd values;
  };

  void diagonalize();

  BandedOperator h_;
  PropagationMethod method_;
  KrylovOptions krylov_;
  std::vector<Chain> chains_;
  Eigen::MatrixXcd dense_vectors_;
  Eigen::VectorXd dense_values_;
  bool dense_ = false;
};

/// exp(-i scale h)|state>. Builds a throwaway Propagator; keep a Propagator
/// around when the same h is applied repeatedly.
DickeState evolve(const DickeState& state, const BandedOperator& h, double scale);

enum class Axis { X, Y, Z };

/// exp(-i angle J_axis)|state>. Rotations about z are diagonal phases.
DickeState rotate(const DickeState& state, Axis axis, double angle);

/// Wigner small-d matrix d^j_{m'm}(beta) = <j m'| exp(-i beta J_y) |j m> in
/// the descending-m basis, from the closed-form sum. Long-double arithmetic;
/// the alternating sum loses accuracy for large j (fine up to N of a few
/// dozen), which is why production rotations go through Propagator.
Eigen::MatrixXd wigner_small_d(const SpinSystem& system, double beta);

const char* to_string(Axis axis) noexcept;

}  // namespace twistecho
