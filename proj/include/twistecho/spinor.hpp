#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "twistecho/krylov.hpp"
#include "twistecho/metrology.hpp"

namespace twistecho {

/// Fixed-N three-mode Fock basis |i;k> = |N0 = N-(i+k), N_S = i, N_A = k>,
/// ordered lexicographically in (l = i+k, i): index = l(l+1)/2 + i.
class ThreeModeSystem {
 public:
  explicit ThreeModeSystem(int n_atoms);

  int n_atoms() const noexcept { return n_; }
  Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(n_ + 1) * (n_ + 2) / 2; }

  static Eigen::Index index(int i, int k) noexcept {
    const Eigen::Index l = i + k;
    return l * (l + 1) / 2 + i;
  }
  int n_s(Eigen::Index index) const { return n_s_[index]; }
  int n_a(Eigen::Index index) const { return n_a_[index]; }
  int n_0(Eigen::Index index) const { return n_ - n_s_[index] - n_a_[index]; }

 private:
  int n_;
  std::vector<int> n_s_;
  std::vector<int> n_a_;
};

struct ThreeModeState {
  std::shared_ptr<const ThreeModeSystem> system;
  Eigen::VectorXcd amplitudes;

  /// All atoms in m_F = 0.
  static ThreeModeState vacuum(std::shared_ptr<const ThreeModeSystem> system);
  double norm() const { return amplitudes.norm(); }
  /// <N_S>, <N_A>.
  double mean_n_s() const;
  double mean_n_a() const;
};

enum class SpinorPart : unsigned { QZ = 1, CS = 2, FWM = 4 };

/// Bit set of SpinorPart values.
struct SpinorParts {
  unsigned bits = 0;

  static SpinorParts all() { return {7u}; }
  static SpinorParts only(SpinorPart p) { return {static_cast<unsigned>(p)}; }
  SpinorParts with(SpinorPart p) const { return {bits | static_cast<unsigned>(p)}; }
  bool has(SpinorPart p) const { return (bits & static_cast<unsigned>(p)) != 0; }
};

struct SpinorParams {
  /// Spin-changing coupling; must be positive.
  double lambda = 1.0;
  /// Quadratic Zeeman shift.
  double q = 0.0;
  /// Two-mode TACT strength with the same squeezing rate: gamma = 2 lambda t N
  /// equals t_chi N, so the interaction time is t = t_chi_equivalent / (2 lambda).
  double t_chi_equivalent = 0.0;
  double echo_ratio = 1.0;
  double theta = 0.0;

  /// q = -lambda (2N - 1), cancelling the collisional shift at full m_F = 0.
  static double compensating_q(int n_atoms, double lambda);
  double time() const { return t_chi_equivalent / (2.0 * lambda); }
  void validate() const;
};

/// Real symmetric sparse Hamiltonian on the three-mode basis.
class SpinorHamiltonian {
 public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SpinorHamiltonian(std::shared_ptr<const ThreeModeSystem> system, Matrix matrix);

  const ThreeModeSystem& system() const noexcept { return *system_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  Eigen::MatrixXd to_dense() const { return Eigen::MatrixXd(matrix_); }
  /// exp(-i scale H) v via Krylov propagation.
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& v, double scale, const KrylovOptions& options = {}) const;

 private:
  std::shared_ptr<const ThreeModeSystem> system_;
  Matrix matrix_;
};

/// QZ:  q (N_S + N_A)
/// CS:  lambda (2 N_0 - 1)(N_S + N_A)
/// FWM: lambda [a0^dag^2 aS^2 + aS^dag^2 a0^2 - a0^dag^2 aA^2 - aA^dag^2 a0^2]
SpinorHamiltonian build_spinor_hamiltonian(std::shared_ptr<const ThreeModeSystem> system,
                                           const SpinorParams& params, SpinorParts parts);

/// J_{y,S} = (a0^dag aS - aS^dag a0) / (2i) applied to v.
Eigen::VectorXcd apply_jy_s(const ThreeModeSystem& system, const Eigen::VectorXcd& v);
/// exp(-i angle J_{y,S}) v, computed sector by sector (fixed N_A) as a Dicke
/// rotation of N - N_A atoms.
Eigen::VectorXcd rotate_y_s(const ThreeModeSystem& system, const Eigen::VectorXcd& v, double angle);
/// Side-mode phase exp(-i angle (N_S + N_A)) v.
Eigen::VectorXcd side_mode_phase(const ThreeModeSystem& system, const Eigen::VectorXcd& v, double angle);

/// Side-mode phase that turns the FWM squeezing axis onto J_{x,S}.
inline constexpr double kSpinorAlignmentPhase = 0.78539816339744830962;  // pi / 4

enum class SpinorVariant { Full, FwmOnly };
enum class SpinorMeasurement { Cropped, Separate };

/// Joint statistics of (N_S, N_A) with exact theta derivative.
struct JointModeDistribution {
  int n_atoms = 0;
  Eigen::VectorXi n_s;
  Eigen::VectorXi n_a;
  Eigen::VectorXd probabilities;
  Eigen::VectorXd derivative;

  /// Sum over N_S + N_A = l; matches the cropped distribution.
  Eigen::VectorXd cropped_probabilities() const;
};

double fisher_information(const JointModeDistribution& dist, double floor = kProbabilityFloor);

/// P_l = sum_{i+k=l} |<i;k|psi>|^2 over the J_z3 = (N - 2l)/2 outcomes.
OutcomeDistribution effective_jz3_distribution(const ThreeModeState& state);
OutcomeDistribution effective_jz3_distribution(const ThreeModeState& state, const Eigen::VectorXcd& derivative);
JointModeDistribution separate_mode_distribution(const ThreeModeState& state);
JointModeDistribution separate_mode_distribution(const ThreeModeState& state, const Eigen::VectorXcd& derivative);

/// The spinor TACT echo, starting from |0;0>:
///   evolve t; phase P(pi/4); imprint exp(-i theta J_{y,S});
///   phase P(-pi/4 - pi/2); evolve r t; phase P(pi/4 + pi/2);
///   RF pi/2 pulse about J_{y,S}; count.
/// P(a) = exp(-i a (N_S + N_A)). The pi/2 side-mode phase flips the sign of
/// the FWM term, so the second evolution undoes the first in the aligned
/// frame (exactly for FwmOnly at theta = 0).
/// Full uses H_QZ + H_CS + H_FWM with the given q; FwmOnly uses H_FWM.
class SpinorEcho {
 public:
  SpinorEcho(int n_atoms, SpinorParams params, SpinorVariant variant);

  const ThreeModeSystem& system() const noexcept { return *system_; }
  std::shared_ptr<const ThreeModeSystem> system_ptr() const noexcept { return system_; }
  const SpinorParams& params() const noexcept { return params_; }
  const SpinorHamiltonian& hamiltonian() const noexcept { return hamiltonian_; }

  /// Aligned squeezed state right before the imprint.
  const Eigen::VectorXcd& prepared() const noexcept { return prepared_; }
  Eigen::VectorXcd imprint(double theta) const;
  /// Echo and frame restore, without the RF pulse. Linear in v.
  Eigen::VectorXcd echo(const Eigen::VectorXcd& v) const;
  /// echo() followed by the RF pi/2 pulse.
  Eigen::VectorXcd downstream(const Eigen::VectorXcd& v) const;

  OutcomeDistribution cropped_distribution(double theta) const;
  JointModeDistribution separate_distribution(double theta) const;
  /// Noisy Fisher information for the chosen measurement. Detection noise
  /// is defined only for the cropped J_z3 readout.
  double fisher(double theta, SpinorMeasurement measurement, const DetectionModel& noise) const;

 private:
  std::pair<Eigen::VectorXcd, Eigen::VectorXcd> final_with_derivative(double theta) const;

  std::shared_ptr<const ThreeModeSystem> system_;
  SpinorParams params_;
  SpinorVariant variant_;
  SpinorHamiltonian hamiltonian_;
  Eigen::VectorXcd prepared_;
};

struct SpinorEchoResult {
  ThreeModeState echoed;
  ThreeModeState final_state;
  OutcomeDistribution cropped;
  /// Filled for SpinorMeasurement::Separate.
  JointModeDistribution separate;
  double fisher_information = 0.0;
};

SpinorEchoResult run_spinor_echo(int n_atoms, const SpinorParams& params, SpinorVariant variant,
                                 SpinorMeasurement measurement);

const char* to_string(SpinorVariant variant) noexcept;
const char* to_string(SpinorMeasurement measurement) noexcept;

}  // namespace twistecho
