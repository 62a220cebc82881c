#include "twistecho/oat_opt.hpp"

#include <cmath>
#include <numbers>

#include "twistecho/errors.hpp"
#include "twistecho/optimize.hpp"

namespace twistecho {

using std::numbers::pi;

namespace {

constexpr int kAngleSamples = 721;
constexpr double kAngleTolerance = 1e-6;

std::vector<double> angle_grid() {
  std::vector<double> g(kAngleSamples);
  for (int i = 0; i < kAngleSamples; ++i) g[i] = -pi / 2 + pi * i / kAngleSamples;
  return g;
}

// Var of J_x after exp(-i a J_z): cos^2 Vxx + sin^2 Vyy - 2 sin cos Vxy.
double rotated_x_variance(const Eigen::Matrix3d& cov, double a) {
  const double c = std::cos(a), s = std::sin(a);
  return c * c * cov(0, 0) + s * s * cov(1, 1) - 2 * s * c * cov(0, 1);
}

}  // namespace

AlignmentResult optimal_alignment_angle(const DickeState& state) {
  const Eigen::Matrix3d cov = spin_covariance(state);
  const double scale = std::max(cov(0, 0) + cov(1, 1), 1e-300);
  if (std::abs(cov(0, 0) - cov(1, 1)) < 1e-9 * scale && std::abs(cov(0, 1)) < 1e-9 * scale) {
    return {0.0, cov(0, 0), true};
  }
  const Maximum best =
      grid_then_refine([&](double a) { return -rotated_x_variance(cov, a); }, angle_grid(), kAngleTolerance);
  double angle = best.x;
  if (angle >= pi / 2) angle -= pi;
  return {angle, -best.value, false};
}

AlignmentResult optimal_alignment_angle(const SpinSystem& system, double t_chi, Twisting kind) {
  auto ws = SpinWorkspace::shared(system.n_atoms());
  return optimal_alignment_angle(ws->twist(DickeState::pole(system), kind, t_chi));
}

void OatOptimizationSpec::validate() const {
  base.validate();
  if (base.protocol != Protocol::OatEcho) throw ContractViolation("OatOptimizationSpec: base must be an OAT echo");
  if (!optimize_alignment && !optimize_readout) {
    throw ContractViolation("OatOptimizationSpec: enable alignment and/or readout optimization");
  }
}

namespace {

EchoSpec with_alignment(const OatOptimizationSpec& spec) {
  EchoSpec out = spec.base;
  if (spec.optimize_alignment) {
    const AlignmentResult a = optimal_alignment_angle(SpinSystem(out.n_atoms), out.t_chi, Twisting::OAT);
    out.pre_imprint_rotation = AxisRotation{Axis::Z, a.angle};
  }
  return out;
}

ReadoutOptimum optimize_readout(const EchoSpec& spec, ReadoutObjective objective) {
  if (spec.theta == 0.0) throw UndefinedSignalError("optimal_readout_angle: theta must be nonzero");
  EchoSpec plain = spec;
  plain.pre_readout_rotation.reset();
  const EchoSequence seq(plain);
  const Eigen::VectorXcd imprinted = seq.imprint(spec.theta);
  const double before = std::abs(seq.workspace().jx().expectation(imprinted).real());
  if (before < 1e-12) throw UndefinedSignalError("optimal_readout_angle: <J_x> vanishes after the imprint");
  const DickeState echoed(seq.system(), seq.echo(imprinted));
  const Eigen::Matrix3d cov = spin_covariance(echoed);
  const Eigen::Vector3d mean = mean_spin(echoed);

  // After exp(-i b J_z) the measured component J_y becomes cos b J_y + sin b J_x.
  auto signal = [&](double b) { return std::cos(b) * mean[1] + std::sin(b) * mean[0]; };
  auto variance = [&](double b) {
    const double c = std::cos(b), s = std::sin(b);
    return c * c * cov(1, 1) + s * s * cov(0, 0) + 2 * s * c * cov(0, 1);
  };
  auto snr = [&](double b) {
    const double v = variance(b);
    return v > 1e-14 ? std::abs(signal(b)) / std::sqrt(v) : 0.0;
  };
  auto magnification = [&](double b) { return std::abs(signal(b)) / before; };

  const std::function<double(double)> f = objective == ReadoutObjective::Snr ? std::function<double(double)>(snr)
                                                                             : std::function<double(double)>(magnification);
  const Maximum best = grid_then_refine(f, angle_grid(), kAngleTolerance);
  if (!(best.value > 0.0)) throw UndefinedSignalError("optimal_readout_angle: signal vanishes at every angle");
  double angle = best.x;
  if (angle >= pi / 2) angle -= pi;
  return {angle, best.value, snr(angle), magnification(angle)};
}

}  // namespace

ReadoutOptimum optimal_readout_angle(const OatOptimizationSpec& spec) {
  spec.validate();
  return optimize_readout(with_alignment(spec), spec.readout_objective);
}

EchoSpec resolve(const OatOptimizationSpec& spec) {
  spec.validate();
  EchoSpec out = with_alignment(spec);
  if (spec.optimize_readout) {
    out.pre_readout_rotation = AxisRotation{Axis::Z, optimize_readout(out, spec.readout_objective).angle};
  }
  return out;
}

const char* to_string(ReadoutObjective objective) noexcept {
  return objective == ReadoutObjective::Snr ? "snr" : "magnification";
}

}  // namespace twistecho
