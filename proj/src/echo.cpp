#include "twistecho/echo.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "twistecho/errors.hpp"
#include "twistecho/optimize.hpp"

namespace twistecho {

using std::numbers::pi;

void EchoSpec::validate() const {
  if (n_atoms < 1) throw ContractViolation("EchoSpec: n_atoms must be positive");
  if (!std::isfinite(t_chi) || t_chi < 0.0) throw ContractViolation("EchoSpec: t_chi must be >= 0");
  if (!std::isfinite(echo_ratio) || echo_ratio < 0.0) throw ContractViolation("EchoSpec: echo_ratio must be >= 0");
  if (!std::isfinite(theta)) throw ContractViolation("EchoSpec: theta must be finite");
  for (const auto* rot : {&pre_imprint_rotation, &pre_readout_rotation}) {
    if (rot->has_value() && !std::isfinite((*rot)->angle)) {
      throw ContractViolation("EchoSpec: rotation angle must be finite");
    }
  }
}

Axis readout_axis(Protocol protocol) noexcept { return protocol == Protocol::TactEcho ? Axis::Y : Axis::X; }

SpinComponent signal_component(Protocol protocol) noexcept {
  return protocol == Protocol::TactEcho ? SpinComponent::X : SpinComponent::Y;
}

EchoSequence::EchoSequence(EchoSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  ws_ = SpinWorkspace::shared(spec_.n_atoms);
  prepared_ = ws_->twist(DickeState::pole(ws_->system()).amplitudes(), spec_.twisting(), spec_.t_chi);
  if (spec_.pre_imprint_rotation) {
    prepared_ = ws_->rotate(prepared_, spec_.pre_imprint_rotation->axis, spec_.pre_imprint_rotation->angle);
  }
}

Eigen::VectorXcd EchoSequence::imprint(double theta) const { return ws_->rotate(prepared_, Axis::Y, theta); }

Eigen::VectorXcd EchoSequence::echo(const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out = ws_->twist(v, spec_.twisting(), -spec_.echo_ratio * spec_.t_chi);
  if (spec_.pre_readout_rotation) {
    out = ws_->rotate(out, spec_.pre_readout_rotation->axis, spec_.pre_readout_rotation->angle);
  }
  return out;
}

Eigen::VectorXcd EchoSequence::downstream(const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out = echo(v);
  if (spec_.readout == ReadoutRotation::Standard) out = ws_->rotate(out, readout_axis(spec_.protocol), pi / 2);
  return out;
}

std::vector<StageSnapshot> EchoSequence::stages(double theta) const {
  const SpinSystem& s = system();
  std::vector<StageSnapshot> out;
  out.push_back({Stage::Prepared, DickeState(s, prepared_)});
  Eigen::VectorXcd v = imprint(theta);
  out.push_back({Stage::Imprinted, DickeState(s, v)});
  v = echo(v);
  out.push_back({Stage::Echoed, DickeState(s, v)});
  if (spec_.readout == ReadoutRotation::Standard) {
    out.push_back({Stage::Readout, DickeState(s, ws_->rotate(v, readout_axis(spec_.protocol), pi / 2))});
  }
  return out;
}

OutcomeDistribution EchoSequence::distribution(double theta) const {
  const Eigen::VectorXcd psi = imprint(theta);
  const Eigen::VectorXcd dpsi = Complex(0.0, -1.0) * ws_->jy().apply(psi);
  return distribution_from_amplitudes(system().eigenvalues(), downstream(psi), downstream(dpsi));
}

double EchoSequence::fisher(double theta, const DetectionModel& noise) const {
  return fisher_information(distribution(theta), noise, spec_.n_atoms);
}

std::vector<StageSnapshot> run_echo(const EchoSpec& spec) { return EchoSequence(spec).stages(spec.theta); }

namespace {

struct SignalMoments {
  double mean = 0.0;
  double variance = 0.0;
};

SignalMoments moments(const BandedOperator& op, const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd v = op.apply(psi);
  const double mean = psi.dot(v).real();
  return {mean, v.squaredNorm() - mean * mean};
}

const BandedOperator& signal_operator(const SpinWorkspace& ws, Protocol protocol) {
  return protocol == Protocol::TactEcho ? ws.jx() : ws.jy();
}

}  // namespace

double magnification_factor(const EchoSpec& spec) {
  const EchoSequence seq(spec);
  const Eigen::VectorXcd imprinted = seq.imprint(spec.theta);
  const double before = moments(seq.workspace().jx(), imprinted).mean;
  if (std::abs(before) < 1e-12) {
    throw UndefinedSignalError("magnification_factor: <J_x> vanishes after the imprint");
  }
  const double after = moments(signal_operator(seq.workspace(), spec.protocol), seq.echo(imprinted)).mean;
  return std::abs(after / before);
}

double signal_to_noise(const EchoSpec& spec) {
  const EchoSequence seq(spec);
  const SignalMoments m = moments(signal_operator(seq.workspace(), spec.protocol), seq.echo(seq.imprint(spec.theta)));
  if (spec.theta == 0.0) return 0.0;
  if (m.variance <= 1e-14) throw DegenerateStateError("signal_to_noise: signal variance vanishes");
  return std::abs(m.mean) / std::sqrt(m.variance);
}

namespace {

SqueezingParameter from_variance(const DickeState& state, double variance, double mean_z) {
  if (std::abs(mean_z) < 1e-12) throw DegenerateStateError("squeezing parameter: <J_z> vanishes");
  const double xi2 = state.system().n_atoms() * variance / (mean_z * mean_z);
  return {xi2, 10.0 * std::log10(xi2)};
}

}  // namespace

SqueezingParameter squeezing_parameter(const DickeState& state) {
  const Eigen::Matrix3d cov = spin_covariance(state);
  return from_variance(state, cov(0, 0), mean_spin(state)[2]);
}

SqueezingParameter squeezing_parameter_min_quadrature(const DickeState& state) {
  const Eigen::Matrix3d cov = spin_covariance(state);
  const double a = cov(0, 0), b = cov(1, 1), c = cov(0, 1);
  const double min_var = 0.5 * (a + b) - std::sqrt(0.25 * (a - b) * (a - b) + c * c);
  return from_variance(state, min_var, mean_spin(state)[2]);
}

double calibrate_twisting(const SpinSystem& system, Twisting kind, double target_db) {
  if (!std::isfinite(target_db) || target_db > 0.0) {
    throw ContractViolation("calibrate_twisting: target must be <= 0 dB");
  }
  if (target_db == 0.0) return 0.0;
  auto ws = SpinWorkspace::shared(system.n_atoms());
  const DickeState pole = DickeState::pole(system);
  auto db_at = [&](double t_chi) {
    const DickeState s = ws->twist(pole, kind, t_chi);
    return kind == Twisting::TACT ? squeezing_parameter(s).db : squeezing_parameter_min_quadrature(s).db;
  };

  // Walk the initial branch in steps of 0.02 in t_chi * N.
  const double dt = 0.02 / system.n_atoms();
  double t_prev = 0.0, db_prev = 0.0;
  for (int step = 1; step <= 200000; ++step) {
    const double t = step * dt;
    const double db = db_at(t);
    if (db <= target_db) {
      double lo = t_prev, hi = t;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = db_at(mid);
        if (std::abs(v - target_db) < 1e-6) return mid;
        (v > target_db ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    if (db >= db_prev && step > 1) {
      const double best = golden_section_maximize([&](double x) { return -db_at(x); },
                                                  std::max(0.0, t_prev - dt), t, 1e-6 * dt).value;
      throw CalibrationError("calibrate_twisting: " + std::to_string(target_db) +
                                 " dB is beyond the reachable squeezing of " + std::to_string(-best) + " dB",
                             -best);
    }
    t_prev = t;
    db_prev = db;
  }
  throw CalibrationError("calibrate_twisting: scan did not terminate", db_prev);
}

double husimi_at(const DickeState& state, double polar, double azimuth) {
  const Eigen::VectorXd mag = coherent_magnitudes(state.system().n_atoms(), polar);
  const Eigen::VectorXcd& psi = state.amplitudes();
  const Complex step = std::polar(1.0, azimuth);
  Complex phase = 1.0, acc = 0.0;
  for (Eigen::Index k = 0; k < psi.size(); ++k) {
    acc += mag[k] * phase * psi[k];
    phase *= step;
  }
  return std::norm(acc);
}

Eigen::MatrixXd husimi(const DickeState& state, int n_polar, int n_azimuth) {
  if (n_polar < 2 || n_azimuth < 2) throw ContractViolation("husimi: grid needs at least 2 x 2 points");
  const int n = state.system().n_atoms();
  const Eigen::VectorXcd& psi = state.amplitudes();
  Eigen::MatrixXd q(n_polar, n_azimuth);
  Eigen::VectorXcd weighted(psi.size());
  for (int i = 0; i < n_polar; ++i) {
    const double polar = pi * i / (n_polar - 1);
    weighted = coherent_magnitudes(n, polar).cast<Complex>().cwiseProduct(psi);
    for (int k = 0; k < n_azimuth; ++k) {
      const Complex step = std::polar(1.0, 2.0 * pi * k / n_azimuth);
      // Horner evaluation of sum_k w_k step^k.
      Complex acc = 0.0;
      for (Eigen::Index a = weighted.size() - 1; a >= 0; --a) acc = acc * step + weighted[a];
      q(i, k) = std::norm(acc);
    }
  }
  return q;
}

CssFidelity css_fidelity(const DickeState& state) {
  const int n_polar = 90, n_azimuth = 180;
  const Eigen::MatrixXd coarse = husimi(state, n_polar, n_azimuth);
  Eigen::Index bi = 0, bk = 0;
  double best = coarse.maxCoeff(&bi, &bk);
  double polar = pi * bi / (n_polar - 1);
  double azimuth = 2.0 * pi * bk / n_azimuth;

  const int n = state.system().n_atoms();
  const Eigen::VectorXcd& psi = state.amplitudes();
  Eigen::VectorXd half_log_binom(n + 1);
  for (int k = 0; k <= n; ++k)
    half_log_binom[k] = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
  // Same value as husimi_at, with the binomials hoisted out of the search.
  auto q_at = [&](double p, double a) {
    const double c = std::cos(0.5 * p), s = std::sin(0.5 * p);
    const double log_c = std::log(std::abs(c)), log_s = std::log(std::abs(s));
    const Complex step = std::polar(1.0, a);
    Complex phase = 1.0, acc = 0.0;
    for (int k = 0; k <= n; ++k, phase *= step) {
      const int nk = n - k;
      if ((nk > 0 && c == 0.0) || (k > 0 && s == 0.0)) continue;
      double mag = std::exp(half_log_binom[k] + (nk > 0 ? nk * log_c : 0.0) + (k > 0 ? k * log_s : 0.0));
      if ((c < 0 && (nk % 2)) != (s < 0 && (k % 2))) mag = -mag;
      acc += mag * phase * psi[k];
    }
    return std::norm(acc);
  };

  // Compass search; the step grows after a successful move so that long
  // shallow ridges are followed quickly.
  const double start = pi / (n_polar - 1);
  double step = start;
  for (int evaluations = 0; step > 1e-7 && evaluations < 20000;) {
    bool moved = false;
    const double candidates[4][2] = {{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}};
    for (const auto& d : candidates) {
      const double p = polar + d[0];
      const double a = azimuth + d[1];
      const double q = q_at(p, a);
      ++evaluations;
      if (q > best) {
        best = q;
        polar = p;
        azimuth = a;
        moved = true;
      }
    }
    step = moved ? std::min(2.0 * step, start) : 0.5 * step;
  }
  // Fold back into polar in [0, pi], azimuth in [0, 2 pi).
  if (polar < 0.0) {
    polar = -polar;
    azimuth += pi;
  }
  if (polar > pi) {
    polar = 2.0 * pi - polar;
    azimuth += pi;
  }
  azimuth = std::fmod(azimuth, 2.0 * pi);
  if (azimuth < 0.0) azimuth += 2.0 * pi;
  return {best, polar, azimuth};
}

PhaseOptimum optimize_phase(const EchoSequence& sequence, const DetectionModel& noise) {
  auto objective = [&](double log_theta) { return sequence.fisher(std::exp(log_theta), noise); };
  std::vector<double> grid = linspace(std::log(1e-4), std::log(0.1), 21);
  const Maximum best = grid_then_refine(objective, grid, 1e-3);
  return {std::exp(best.x), best.value};
}

PhaseOptimum optimize_phase(const EchoSpec& spec, const DetectionModel& noise) {
  return optimize_phase(EchoSequence(spec), noise);
}

const char* to_string(Protocol protocol) noexcept {
  return protocol == Protocol::TactEcho ? "tact_echo" : "oat_echo";
}

const char* to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::Prepared:
      return "prepared";
    case Stage::Imprinted:
      return "imprinted";
    case Stage::Echoed:
      return "echoed";
    case Stage::Readout:
      return "readout";
  }
  return "?";
}

}  // namespace twistecho
