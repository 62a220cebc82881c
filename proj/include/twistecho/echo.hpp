#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twistecho/dicke.hpp"
#include "twistecho/metrology.hpp"
#include "twistecho/propagator.hpp"
#include "twistecho/spin_operators.hpp"
#include "twistecho/workspace.hpp"

namespace twistecho {

enum class Protocol { TactEcho, OatEcho };

enum class ReadoutRotation {
  /// pi/2 mid-fringe pulse: about y for TACT, about x for OAT.
  Standard,
  None,
};

struct AxisRotation {
  Axis axis = Axis::Z;
  double angle = 0.0;
};

/// Full description of one twisting-echo run:
///   prepare  exp(-i t_chi H) on the +z coherent state, optional rotation
///   imprint  exp(-i theta J_y)
///   echo     exp(+i r t_chi H), optional rotation
///   readout  pi/2 pulse
struct EchoSpec {
  Protocol protocol = Protocol::TactEcho;
  int n_atoms = 100;
  double t_chi = 0.0;
  /// r = 0 means no echo at all.
  double echo_ratio = 1.0;
  double theta = 0.0;
  std::optional<AxisRotation> pre_imprint_rotation;
  std::optional<AxisRotation> pre_readout_rotation;
  ReadoutRotation readout = ReadoutRotation::Standard;

  void validate() const;
  Twisting twisting() const noexcept { return protocol == Protocol::TactEcho ? Twisting::TACT : Twisting::OAT; }
};

enum class Stage { Prepared, Imprinted, Echoed, Readout };

struct StageSnapshot {
  Stage label;
  DickeState state;
};

/// Axis of the pi/2 readout pulse for a protocol.
Axis readout_axis(Protocol protocol) noexcept;
/// Spin component the readout pulse maps onto J_z, i.e. the component that
/// carries the measured signal before the pulse: x for TACT, y for OAT.
SpinComponent signal_component(Protocol protocol) noexcept;

/// Precomputed pieces of an echo sequence for repeated evaluation at
/// different phases. The spec's theta is ignored by the phase-taking
/// methods. Immutable; safe to share across threads.
class EchoSequence {
 public:
  explicit EchoSequence(EchoSpec spec);

  const EchoSpec& spec() const noexcept { return spec_; }
  const SpinWorkspace& workspace() const noexcept { return *ws_; }
  const SpinSystem& system() const noexcept { return ws_->system(); }

  /// State after twisting and the optional pre-imprint rotation.
  const Eigen::VectorXcd& prepared() const noexcept { return prepared_; }
  Eigen::VectorXcd imprint(double theta) const;
  /// Echo plus the optional pre-readout rotation.
  Eigen::VectorXcd echo(const Eigen::VectorXcd& v) const;
  /// echo() followed by the readout pulse (if any). Linear in v.
  Eigen::VectorXcd downstream(const Eigen::VectorXcd& v) const;

  std::vector<StageSnapshot> stages(double theta) const;
  /// Final J_z statistics at phase theta with exact dP/dtheta.
  OutcomeDistribution distribution(double theta) const;
  /// F (noiseless) or F~ at phase theta.
  double fisher(double theta, const DetectionModel& noise) const;

 private:
  EchoSpec spec_;
  std::shared_ptr<const SpinWorkspace> ws_;
  Eigen::VectorXcd prepared_;
};

/// Snapshots after preparation, imprint, echo and readout. The readout
/// snapshot is present only with ReadoutRotation::Standard.
std::vector<StageSnapshot> run_echo(const EchoSpec& spec);

/// M = <S>_echoed / <J_x>_imprinted with S the protocol's signal component
/// (J_x for TACT, J_y for OAT), magnitudes taken. Throws
/// UndefinedSignalError when <J_x>_imprinted vanishes.
double magnification_factor(const EchoSpec& spec);

/// |<S>| / Delta S on the echoed state. Zero when theta = 0; throws
/// DegenerateStateError when the variance vanishes.
double signal_to_noise(const EchoSpec& spec);

struct SqueezingParameter {
  double linear = 1.0;
  double db = 0.0;
};

/// xi_R^2 = N Var(J_x) / <J_z>^2 with the mean spin along z and phases
/// generated by J_y. Throws DegenerateStateError when <J_z> = 0.
SqueezingParameter squeezing_parameter(const DickeState& state);
/// Same with Var(J_x) replaced by the smallest variance of any spin
/// component in the x-y plane.
SqueezingParameter squeezing_parameter_min_quadrature(const DickeState& state);

/// Smallest t_chi > 0 with 10 log10 xi^2 = target_db (within 0.01 dB) on the
/// initial monotone branch. OAT uses the minimum-quadrature parameter since
/// its squeezing axis rotates. Throws CalibrationError when the branch
/// bottoms out above the target, and ContractViolation for positive targets.
double calibrate_twisting(const SpinSystem& system, Twisting kind, double target_db);

/// Q(polar_i, azimuth_k) = |<CSS(polar_i, azimuth_k)|psi>|^2 with
/// polar_i = pi i / (n_polar - 1) and azimuth_k = 2 pi k / n_azimuth.
Eigen::MatrixXd husimi(const DickeState& state, int n_polar, int n_azimuth);
/// Q at one direction.
double husimi_at(const DickeState& state, double polar, double azimuth);

struct CssFidelity {
  double fidelity = 0.0;
  double polar = 0.0;
  double azimuth = 0.0;
};

/// Best overlap with any coherent spin state: 90 x 180 grid, then local
/// compass search down to 1e-7 rad.
CssFidelity css_fidelity(const DickeState& state);

struct PhaseOptimum {
  double theta = 0.0;
  double fisher = 0.0;
};

/// Maximizes the (noisy) Fisher information over theta in (0, 0.1]: 21
/// log-spaced samples from 1e-4 to 0.1, then golden section in log theta.
PhaseOptimum optimize_phase(const EchoSequence& sequence, const DetectionModel& noise);
PhaseOptimum optimize_phase(const EchoSpec& spec, const DetectionModel& noise);

const char* to_string(Protocol protocol) noexcept;
const char* to_string(Stage stage) noexcept;

}  // namespace twistecho
