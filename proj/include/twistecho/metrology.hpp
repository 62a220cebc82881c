#pragma once

#include <functional>

#include <Eigen/Dense>

#include "twistecho/banded_operator.hpp"
#include "twistecho/dicke.hpp"

namespace twistecho {

/// Discrete outcome statistics P(mu|theta) together with the exact
/// derivative dP/dtheta.
struct OutcomeDistribution {
  Eigen::VectorXd eigenvalues;  // measured values, descending
  Eigen::VectorXd probabilities;
  Eigen::VectorXd derivative;

  /// Non-negative probabilities summing to one and derivatives summing to
  /// zero, within the given tolerances. Throws StructuralError otherwise.
  void validate(double probability_tolerance = 1e-10, double derivative_tolerance = 1e-9) const;
};

using LinearMap = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

/// Builds P and dP/dtheta from the final amplitudes and their theta
/// derivative: dP = 2 Re[conj(psi) dpsi].
OutcomeDistribution distribution_from_amplitudes(const Eigen::VectorXd& eigenvalues,
                                                 const Eigen::VectorXcd& final_state,
                                                 const Eigen::VectorXcd& final_derivative);

/// J_z statistics of downstream(psi_theta), where `imprinted` is psi_theta
/// right after the phase imprint exp(-i theta G). The derivative inserts
/// -iG psi_theta and pushes it through the same linear downstream map.
OutcomeDistribution outcome_distribution(const DickeState& imprinted, const BandedOperator& generator,
                                         const LinearMap& downstream);

inline constexpr double kProbabilityFloor = 1e-14;

/// Classical Fisher information sum_mu (dP)^2 / P over outcomes with P > floor.
double fisher_information(const OutcomeDistribution& dist, double floor = kProbabilityFloor);

enum class NoiseKind { None, Constant, SqrtNScaled };

/// Gaussian detection noise on the final J_z counting variable.
struct DetectionModel {
  NoiseKind kind = NoiseKind::None;
  /// sigma for Constant, coefficient c in sigma = c sqrt(N) for SqrtNScaled.
  double value = 0.0;

  static DetectionModel none() { return {}; }
  static DetectionModel constant(double sigma) { return {NoiseKind::Constant, sigma}; }
  static DetectionModel sqrt_n_scaled(double coefficient) { return {NoiseKind::SqrtNScaled, coefficient}; }
  /// sigma_CSS = sqrt(N)/2, the projection noise of a coherent state.
  static DetectionModel css_level() { return sqrt_n_scaled(0.5); }

  double sigma(int n_atoms) const;
  void validate() const;
};

/// Continuous density on a uniform grid x_i = x0 + i * step.
struct NoisySmearedDistribution {
  double x0 = 0.0;
  double step = 1.0;
  double sigma = 0.0;
  Eigen::VectorXd density;
  Eigen::VectorXd derivative;

  Eigen::VectorXd grid() const;
  /// Trapezoidal integral of the density.
  double total() const;
};

/// Convolves P and dP with a normal density of width sigma. The grid spans
/// [min mu - 6 sigma, max mu + 6 sigma] with step min(sigma/10, 0.5).
NoisySmearedDistribution smear(const OutcomeDistribution& dist, double sigma);
NoisySmearedDistribution smear(const OutcomeDistribution& dist, const DetectionModel& model, int n_atoms);

/// Trapezoidal integral of (dP~)^2 / P~ over grid points with P~ > floor.
double noisy_fisher_information(const NoisySmearedDistribution& smeared, double floor = kProbabilityFloor);

/// Discrete Fisher information when the model is noiseless, smeared
/// otherwise.
double fisher_information(const OutcomeDistribution& dist, const DetectionModel& model, int n_atoms);

/// Symmetrized covariance matrix of (J_x, J_y, J_z).
Eigen::Matrix3d spin_covariance(const DickeState& state);
Eigen::Vector3d mean_spin(const DickeState& state);

struct QuantumFisher {
  /// 4 Var(J_y): the phase generator of the interferometer.
  double generator_y = 0.0;
  /// 4 lambda_max of the spin covariance: best rotation axis.
  double optimal = 0.0;
};

QuantumFisher quantum_fisher_information(const DickeState& state);

/// ln(2 pi N) / (2N).
double optimal_twisting_seed(int n_atoms);

struct OptimalTwisting {
  double t_chi = 0.0;
  double seed = 0.0;
  double f_q = 0.0;
};

/// Maximizer of the optimal-axis QFI of the TACT state over t_chi: a
/// 101-point scan over [0.5, 1.5] x seed followed by golden-section
/// refinement to 1e-4 relative.
OptimalTwisting optimal_twisting(const SpinSystem& system);

}  // namespace twistecho
