#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "twistecho/dicke.hpp"

namespace twistecho {

/// Banded matrix over the Dicke basis of one SpinSystem.
///
/// Band `k` holds the entries with row - col == k, so band k has dim - |k|
/// entries and element t sits at (t + max(k, 0), t + max(-k, 0)). With the
/// descending-m basis, J_z is band 0 and J_+ / J_- are bands -1 / +1. The
/// class does not require hermiticity; evolution checks it.
class BandedOperator {
 public:
  explicit BandedOperator(SpinSystem system);

  const SpinSystem& system() const noexcept { return system_; }
  Eigen::Index dim() const noexcept { return system_.dim(); }

  /// Replaces band `offset`. Bands beyond the matrix are rejected.
  void set_band(int offset, Eigen::VectorXcd values);
  /// nullptr when the band is absent.
  const Eigen::VectorXcd* band(int offset) const;
  std::vector<int> offsets() const;
  const std::map<int, Eigen::VectorXcd>& bands() const noexcept { return bands_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  Eigen::MatrixXcd to_dense() const;
  BandedOperator adjoint() const;
  bool is_hermitian(double tolerance = 1e-14) const;
  /// True when every stored entry has zero imaginary part.
  bool is_real() const;

  /// <psi|A|psi>.
  Complex expectation(const DickeState& state) const;
  Complex expectation(const Eigen::VectorXcd& psi) const;

  /// Drops bands whose entries are all exactly zero.
  BandedOperator pruned() const;

  BandedOperator& operator+=(const BandedOperator& other);
  BandedOperator& operator-=(const BandedOperator& other);
  BandedOperator& operator*=(Complex factor);

  friend BandedOperator operator+(BandedOperator a, const BandedOperator& b) { return a += b; }
  friend BandedOperator operator-(BandedOperator a, const BandedOperator& b) { return a -= b; }
  friend BandedOperator operator*(BandedOperator a, Complex factor) { return a *= factor; }
  friend BandedOperator operator*(Complex factor, BandedOperator a) { return a *= factor; }
  /// Matrix product; band offsets add.
  friend BandedOperator operator*(const BandedOperator& a, const BandedOperator& b);

 private:
  SpinSystem system_;
  std::map<int, Eigen::VectorXcd> bands_;
};

}  // namespace twistecho
