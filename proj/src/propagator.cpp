#include "twistecho/propagator.hpp"

#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

#include "twistecho/errors.hpp"
#include "twistecho/spin_operators.hpp"

namespace twistecho {

Propagator::Propagator(BandedOperator h, PropagationMethod method, KrylovOptions krylov)
    : h_(h.pruned()), method_(method), krylov_(krylov) {
  if (!h_.is_hermitian(1e-12)) throw StructuralError("Propagator: operator is not Hermitian");
  if (method_ == PropagationMethod::Automatic) {
    method_ = h_.dim() <= kSpectralDimLimit ? PropagationMethod::Spectral : PropagationMethod::Krylov;
  }
  if (method_ == PropagationMethod::Spectral) diagonalize();
}

void Propagator::diagonalize() {
  const Eigen::Index n = h_.dim();
  std::set<int> distances;
  for (int k : h_.offsets()) {
    if (k != 0) distances.insert(std::abs(k));
  }

  if (distances.size() > 1) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h_.to_dense());
    dense_vectors_ = eig.eigenvectors();
    dense_values_ = eig.eigenvalues();
    dense_ = true;
    return;
  }

  const int b = distances.empty() ? 1 : *distances.begin();
  const Eigen::VectorXcd* diag = h_.band(0);
  const Eigen::VectorXcd* lower = h_.band(b);  // H(r + b, r)
  for (int start = 0; start < b && start < n; ++start) {
    Chain chain;
    for (Eigen::Index s = start; s < n; s += b) chain.sites.push_back(s);
    const Eigen::Index len = static_cast<Eigen::Index>(chain.sites.size());
    Eigen::VectorXd d(len);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(std::max<Eigen::Index>(len - 1, 0));
    chain.gauge.resize(len);
    chain.gauge[0] = 1.0;
    for (Eigen::Index a = 0; a < len; ++a) {
      const Eigen::Index site = chain.sites[a];
      d[a] = diag != nullptr ? (*diag)[site].real() : 0.0;
      if (a + 1 < len) {
        // Upper element H(site, site + b) = conj(H(site + b, site)).
        const Complex upper = lower != nullptr ? std::conj((*lower)[site]) : Complex(0.0);
        const double mag = std::abs(upper);
        e[a] = mag;
        // conj(g_a) * upper * g_{a+1} must be real and non-negative.
        chain.gauge[a + 1] = mag > 0.0 ? chain.gauge[a] * std::conj(upper) / mag : chain.gauge[a];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    if (len == 1) {
      chain.vectors = Eigen::MatrixXd::Ones(1, 1);
      chain.values = d;
    } else {
      eig.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
      chain.vectors = eig.eigenvectors();
      chain.values = eig.eigenvalues();
    }
    chains_.push_back(std::move(chain));
  }
}

Eigen::VectorXcd Propagator::apply(const Eigen::VectorXcd& v, double scale) const {
  if (v.size() != h_.dim()) throw StructuralError("Propagator::apply: dimension mismatch");
  if (!std::isfinite(scale)) throw ContractViolation("Propagator::apply: non-finite scale");
  if (scale == 0.0) return v;
  if (method_ == PropagationMethod::Krylov) {
    return krylov_expm([this](const Eigen::VectorXcd& x) { return h_.apply(x); }, v, scale, krylov_);
  }
  if (dense_) {
    Eigen::VectorXcd c = dense_vectors_.adjoint() * v;
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -scale * dense_values_[i]);
    return dense_vectors_ * c;
  }
  Eigen::VectorXcd out(v.size());
  for (const Chain& chain : chains_) {
    const Eigen::Index len = static_cast<Eigen::Index>(chain.sites.size());
    Eigen::VectorXd re(len), im(len);
    for (Eigen::Index a = 0; a < len; ++a) {
      const Complex y = std::conj(chain.gauge[a]) * v[chain.sites[a]];
      re[a] = y.real();
      im[a] = y.imag();
    }
    Eigen::VectorXd cr = chain.vectors.transpose() * re;
    Eigen::VectorXd ci = chain.vectors.transpose() * im;
    for (Eigen::Index a = 0; a < len; ++a) {
      const Complex c = Complex(cr[a], ci[a]) * std::polar(1.0, -scale * chain.values[a]);
      cr[a] = c.real();
      ci[a] = c.imag();
    }
    re.noalias() = chain.vectors * cr;
    im.noalias() = chain.vectors * ci;
    for (Eigen::Index a = 0; a < len; ++a) out[chain.sites[a]] = chain.gauge[a] * Complex(re[a], im[a]);
  }
  return out;
}

DickeState Propagator::apply(const DickeState& state, double scale) const {
  if (!(state.system() == h_.system())) throw StructuralError("Propagator::apply: spin systems differ");
  return DickeState(state.system(), apply(state.amplitudes(), scale));
}

Eigen::VectorXd Propagator::eigenvalues() const {
  if (method_ != PropagationMethod::Spectral) {
    throw ContractViolation("Propagator::eigenvalues: not a spectral propagator");
  }
  if (dense_) return dense_values_;
  std::vector<double> all;
  for (const Chain& c : chains_) all.insert(all.end(), c.values.data(), c.values.data() + c.values.size());
  std::sort(all.begin(), all.end());
  return Eigen::Map<Eigen::VectorXd>(all.data(), static_cast<Eigen::Index>(all.size()));
}

DickeState evolve(const DickeState& state, const BandedOperator& h, double scale) {
  if (!(state.system() == h.system())) throw StructuralError("evolve: spin systems differ");
  if (scale == 0.0) return state;
  return Propagator(h).apply(state, scale);
}

DickeState rotate(const DickeState& state, Axis axis, double angle) {
  if (angle == 0.0) return state;
  const SpinSystem& system = state.system();
  if (axis == Axis::Z) {
    Eigen::VectorXcd v = state.amplitudes();
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, -angle * system.m(i));
    return DickeState(system, std::move(v));
  }
  const SpinComponent c = axis == Axis::X ? SpinComponent::X : SpinComponent::Y;
  return evolve(state, build_spin_operator(system, c), angle);
}

Eigen::MatrixXd wigner_small_d(const SpinSystem& system, double beta) {
  const int two_j = system.two_j();
  const Eigen::Index n = system.dim();
  Eigen::MatrixXd d(n, n);
  const long double c = std::cos(0.5L * beta);
  const long double s = std::sin(0.5L * beta);
  auto lfact = [](int k) { return std::lgamma(static_cast<long double>(k) + 1.0L); };
  // Row/col a <-> m = j - a. With integer j+m, j-m the standard sum reads
  // sum_k (-1)^{k+m'-m} sqrt((j+m')!(j-m')!(j+m)!(j-m)!)
  //       / ((j+m-k)! k! (j-m'-k)! (k+m'-m)!) c^{2j-2k-(m'-m)} s^{2k+m'-m}.
  for (Eigen::Index row = 0; row < n; ++row) {
    for (Eigen::Index col = 0; col < n; ++col) {
      const int jp_mp = two_j - static_cast<int>(row);
      const int jm_mp = static_cast<int>(row);
      const int jp_m = two_j - static_cast<int>(col);
      const int jm_m = static_cast<int>(col);
      const int dm = static_cast<int>(col - row);  // m' - m
      const long double log_pref = 0.5L * (lfact(jp_mp) + lfact(jm_mp) + lfact(jp_m) + lfact(jm_m));
      long double sum = 0.0L;
      for (int k = std::max(0, -dm); k <= std::min(jp_m, jm_mp); ++k) {
        long double term =
            std::exp(log_pref - lfact(jp_m - k) - lfact(k) - lfact(jm_mp - k) - lfact(k + dm));
        const int pow_c = two_j - 2 * k - dm;
        const int pow_s = 2 * k + dm;
        if (pow_c > 0) term *= std::pow(c, pow_c);
        if (pow_s > 0) term *= std::pow(s, pow_s);
        if ((k + dm) % 2 != 0) term = -term;
        sum += term;
      }
      d(row, col) = static_cast<double>(sum);
    }
  }
  return d;
}

const char* to_string(Axis axis) noexcept {
  switch (axis) {
    case Axis::X:
      return "x";
    case Axis::Y:
      return "y";
    case Axis::Z:
      return "z";
  }
  return "?";
}

}  // namespace twistecho
