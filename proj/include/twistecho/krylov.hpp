#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace twistecho {

struct KrylovOptions {
  /// Target 2-norm error of the propagated vector relative to its norm.
  double tolerance = 1e-12;
  int max_subspace = 40;
};

/// exp(-i scale H) v for a Hermitian H given only through `apply_h`.
///
/// Lanczos with full reorthogonalization. The time step is adapted per
/// subspace using the standard a-posteriori residual estimate
/// beta_{m+1} |[exp(-i tau T_m)]_{m,1}|; shrinking the step reuses the same
/// subspace, so only the small exponential is recomputed.
template <class ApplyH>
Eigen::VectorXcd krylov_expm(ApplyH&& apply_h, const Eigen::VectorXcd& v, double scale,
                             const KrylovOptions& options = {}) {
  using Complex = std::complex<double>;
  const Eigen::Index n = v.size();
  Eigen::VectorXcd w = v;
  const double v_norm = v.norm();
  if (scale == 0.0 || v_norm == 0.0 || n == 0) return w;

  const int m_max = static_cast<int>(std::min<Eigen::Index>(options.max_subspace, n));
  const double total = std::abs(scale);
  const double sign = scale > 0 ? 1.0 : -1.0;
  double done = 0.0;
  double tau = total;

  Eigen::MatrixXcd basis(n, m_max + 1);
  while (done < total) {
    const double beta = w.norm();
    if (beta == 0.0) break;
    basis.col(0) = w / beta;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m_max, m_max);
    double next_beta = 0.0;
    int m = m_max;
    for (int k = 0; k < m_max; ++k) {
      Eigen::VectorXcd u = apply_h(Eigen::VectorXcd(basis.col(k)));
      const double alpha = basis.col(k).dot(u).real();
      t(k, k) = alpha;
      // Two passes of classical Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        Eigen::VectorXcd coeffs = basis.leftCols(k + 1).adjoint() * u;
        u.noalias() -= basis.leftCols(k + 1) * coeffs;
      }
      next_beta = u.norm();
      if (next_beta <= 1e-13 * std::max(1.0, std::abs(alpha))) {
        // Invariant subspace: the projection is exact.
        m = k + 1;
        next_beta = 0.0;
        break;
      }
      if (k + 1 < m_max) {
        t(k, k + 1) = next_beta;
        t(k + 1, k) = next_beta;
      }
      basis.col(k + 1) = u / next_beta;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t.topLeftCorner(m, m));
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const Eigen::MatrixXd& q = eig.eigenvectors();
    const double remaining = total - done;
    // A step spanning more than ~m/2 radians of the Ritz spectrum cannot be
    // resolved by an m-dimensional subspace.
    const double width = lambda[m - 1] - lambda[0];
    if (next_beta != 0.0 && width > 0.0) tau = std::min(tau, 0.5 * m / width);
    tau = next_beta == 0.0 ? remaining : std::min(tau, remaining);
    Eigen::VectorXcd y(m);
    for (;;) {
      Eigen::VectorXcd phase(m);
      for (int i = 0; i < m; ++i) phase[i] = q(0, i) * std::polar(1.0, -sign * tau * lambda[i]);
      y = q.cast<Complex>() * phase;
      const double err = beta * next_beta * std::abs(y[m - 1]);
      // The estimate bottoms out at rounding level, ~eps * beta_{m+1}.
      const double floor = 64.0 * std::numeric_limits<double>::epsilon() * beta * next_beta;
      const double allowed =
          std::max(options.tolerance * v_norm * std::max(tau / total, 1e-3), floor);
      if (err <= allowed || next_beta == 0.0) break;
      tau *= 0.5;
      if (tau < 1e-14 * total) throw std::runtime_error("krylov_expm: step size underflow");
    }
    w = beta * (basis.leftCols(m) * y);
    done += tau;
    if (total - done < 1e-15 * total) break;
    // Let the next subspace try a longer step.
    tau = std::min(2.0 * tau, total - done);
  }
  return w;
}

}  // namespace twistecho
