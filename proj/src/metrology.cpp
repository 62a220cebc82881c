#include "twistecho/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "twistecho/errors.hpp"
#include "twistecho/optimize.hpp"
#include "twistecho/spin_operators.hpp"
#include "twistecho/workspace.hpp"

namespace twistecho {

void OutcomeDistribution::validate(double probability_tolerance, double derivative_tolerance) const {
  if (probabilities.size() != eigenvalues.size() || derivative.size() != eigenvalues.size()) {
    throw StructuralError("OutcomeDistribution: vector lengths differ");
  }
  if (probabilities.size() > 0 && probabilities.minCoeff() < -probability_tolerance) {
    throw StructuralError("OutcomeDistribution: negative probability");
  }
  if (std::abs(probabilities.sum() - 1.0) > probability_tolerance) {
    throw StructuralError("OutcomeDistribution: probabilities sum to " + std::to_string(probabilities.sum()));
  }
  if (std::abs(derivative.sum()) > derivative_tolerance) {
    throw StructuralError("OutcomeDistribution: derivative does not sum to zero");
  }
}

OutcomeDistribution distribution_from_amplitudes(const Eigen::VectorXd& eigenvalues,
                                                 const Eigen::VectorXcd& final_state,
                                                 const Eigen::VectorXcd& final_derivative) {
  if (final_state.size() != eigenvalues.size() || final_derivative.size() != eigenvalues.size()) {
    throw StructuralError("distribution_from_amplitudes: dimension mismatch");
  }
  OutcomeDistribution d;
  d.eigenvalues = eigenvalues;
  d.probabilities = final_state.cwiseAbs2();
  d.derivative = 2.0 * (final_state.conjugate().array() * final_derivative.array()).real().matrix();
  return d;
}

OutcomeDistribution outcome_distribution(const DickeState& imprinted, const BandedOperator& generator,
                                         const LinearMap& downstream) {
  if (!(generator.system() == imprinted.system())) {
    throw StructuralError("outcome_distribution: generator acts on a different system");
  }
  const Eigen::VectorXcd d_imprinted = Complex(0.0, -1.0) * generator.apply(imprinted.amplitudes());
  return distribution_from_amplitudes(imprinted.system().eigenvalues(), downstream(imprinted.amplitudes()),
                                      downstream(d_imprinted));
}

double fisher_information(const OutcomeDistribution& dist, double floor) {
  double f = 0.0;
  for (Eigen::Index i = 0; i < dist.probabilities.size(); ++i) {
    const double p = dist.probabilities[i];
    if (p > floor) f += dist.derivative[i] * dist.derivative[i] / p;
  }
  return f;
}

double DetectionModel::sigma(int n_atoms) const {
  switch (kind) {
    case NoiseKind::None:
      return 0.0;
    case NoiseKind::Constant:
      return value;
    case NoiseKind::SqrtNScaled:
      return value * std::sqrt(static_cast<double>(n_atoms));
  }
  return 0.0;
}

void DetectionModel::validate() const {
  if (!std::isfinite(value) || value < 0.0) throw ContractViolation("DetectionModel: negative or non-finite width");
  if (kind == NoiseKind::None && value != 0.0) throw ContractViolation("DetectionModel: kind none carries a width");
  if (kind != NoiseKind::None && value == 0.0) {
    throw ContractViolation("DetectionModel: zero width must use kind none");
  }
}

Eigen::VectorXd NoisySmearedDistribution::grid() const {
  Eigen::VectorXd x(density.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = x0 + step * static_cast<double>(i);
  return x;
}

double NoisySmearedDistribution::total() const {
  if (density.size() < 2) return 0.0;
  return step * (density.sum() - 0.5 * (density[0] + density[density.size() - 1]));
}

NoisySmearedDistribution smear(const OutcomeDistribution& dist, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ContractViolation("smear: sigma must be positive; use the discrete path for sigma = 0");
  }
  NoisySmearedDistribution out;
  out.sigma = sigma;
  out.step = std::min(sigma / 10.0, 0.5);
  const double lo = dist.eigenvalues.minCoeff() - 6.0 * sigma;
  const double hi = dist.eigenvalues.maxCoeff() + 6.0 * sigma;
  const auto count = static_cast<Eigen::Index>(std::ceil((hi - lo) / out.step)) + 1;
  out.x0 = lo;
  out.density = Eigen::VectorXd::Zero(count);
  out.derivative = Eigen::VectorXd::Zero(count);

  // Kernel truncated at 9 sigma, where it is below 3e-18 of its peak.
  const double cutoff = 9.0 * sigma;
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  for (Eigen::Index k = 0; k < dist.eigenvalues.size(); ++k) {
    const double p = dist.probabilities[k];
    const double dp = dist.derivative[k];
    if (p == 0.0 && dp == 0.0) continue;
    const double mu = dist.eigenvalues[k];
    const auto first = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil((mu - cutoff - lo) / out.step)));
    const auto last = std::min<Eigen::Index>(count - 1, static_cast<Eigen::Index>(std::floor((mu + cutoff - lo) / out.step)));
    for (Eigen::Index i = first; i <= last; ++i) {
      const double u = lo + out.step * static_cast<double>(i) - mu;
      const double g = norm * std::exp(-u * u * inv_two_var);
      out.density[i] += p * g;
      out.derivative[i] += dp * g;
    }
  }
  return out;
}

NoisySmearedDistribution smear(const OutcomeDistribution& dist, const DetectionModel& model, int n_atoms) {
  model.validate();
  return smear(dist, model.sigma(n_atoms));
}

double noisy_fisher_information(const NoisySmearedDistribution& smeared, double floor) {
  const Eigen::Index n = smeared.density.size();
  double f = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = smeared.density[i];
    if (p <= floor) continue;
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    f += w * smeared.derivative[i] * smeared.derivative[i] / p;
  }
  return f * smeared.step;
}

double fisher_information(const OutcomeDistribution& dist, const DetectionModel& model, int n_atoms) {
  model.validate();
  const double sigma = model.sigma(n_atoms);
  if (sigma == 0.0) return fisher_information(dist);
  return noisy_fisher_information(smear(dist, sigma));
}

namespace {

struct SpinMoments {
  Eigen::Vector3d mean;
  Eigen::Matrix3d covariance;
};

SpinMoments spin_moments(const DickeState& state) {
  const SpinSystem& s = state.system();
  const Eigen::VectorXcd& psi = state.amplitudes();
  const Eigen::VectorXcd v[3] = {build_spin_operator(s, SpinComponent::X).apply(psi),
                                 build_spin_operator(s, SpinComponent::Y).apply(psi),
                                 build_spin_operator(s, SpinComponent::Z).apply(psi)};
  const double norm2 = psi.squaredNorm();
  SpinMoments m;
  for (int a = 0; a < 3; ++a) m.mean[a] = psi.dot(v[a]).real() / norm2;
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      // <J_a J_b> = (J_a psi)^dagger (J_b psi); the real part symmetrizes.
      const double second = v[a].dot(v[b]).real() / norm2;
      m.covariance(a, b) = m.covariance(b, a) = second - m.mean[a] * m.mean[b];
    }
  }
  return m;
}

}  // namespace

Eigen::Matrix3d spin_covariance(const DickeState& state) { return spin_moments(state).covariance; }

Eigen::Vector3d mean_spin(const DickeState& state) { return spin_moments(state).mean; }

QuantumFisher quantum_fisher_information(const DickeState& state) {
  const Eigen::Matrix3d cov = spin_covariance(state);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov, Eigen::EigenvaluesOnly);
  return {4.0 * cov(1, 1), 4.0 * eig.eigenvalues()[2]};
}

double optimal_twisting_seed(int n_atoms) {
  const double n = static_cast<double>(n_atoms);
  return std::log(2.0 * std::numbers::pi * n) / (2.0 * n);
}

OptimalTwisting optimal_twisting(const SpinSystem& system) {
  if (system.n_atoms() < 2) throw ContractViolation("optimal_twisting: needs N >= 2");
  auto ws = SpinWorkspace::shared(system.n_atoms());
  const DickeState pole = DickeState::pole(system);
  auto qfi = [&](double t_chi) {
    return quantum_fisher_information(ws->twist(pole, Twisting::TACT, t_chi)).optimal;
  };
  const double seed = optimal_twisting_seed(system.n_atoms());
  const Maximum best = grid_then_refine(qfi, linspace(0.5 * seed, 1.5 * seed, 101), 1e-4 * seed);
  return {best.x, seed, best.value};
}

}  // namespace twistecho
