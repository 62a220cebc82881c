#include "twistecho/spinor.hpp"

#include <cmath>
#include <numbers>

#include "twistecho/errors.hpp"
#include "twistecho/workspace.hpp"

namespace twistecho {

using std::numbers::pi;

ThreeModeSystem::ThreeModeSystem(int n_atoms) : n_(n_atoms) {
  if (n_atoms < 1) throw ContractViolation("ThreeModeSystem: n_atoms must be positive");
  n_s_.reserve(dim());
  n_a_.reserve(dim());
  for (int l = 0; l <= n_; ++l) {
    for (int i = 0; i <= l; ++i) {
      n_s_.push_back(i);
      n_a_.push_back(l - i);
    }
  }
}

ThreeModeState ThreeModeState::vacuum(std::shared_ptr<const ThreeModeSystem> system) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(system->dim());
  v[0] = 1.0;
  return {std::move(system), std::move(v)};
}

double ThreeModeState::mean_n_s() const {
  double acc = 0.0;
  for (Eigen::Index a = 0; a < amplitudes.size(); ++a) acc += system->n_s(a) * std::norm(amplitudes[a]);
  return acc;
}

double ThreeModeState::mean_n_a() const {
  double acc = 0.0;
  for (Eigen::Index a = 0; a < amplitudes.size(); ++a) acc += system->n_a(a) * std::norm(amplitudes[a]);
  return acc;
}

double SpinorParams::compensating_q(int n_atoms, double lambda) { return -lambda * (2.0 * n_atoms - 1.0); }

void SpinorParams::validate() const {
  if (!std::isfinite(lambda) || lambda <= 0.0) throw ContractViolation("SpinorParams: lambda must be positive");
  if (!std::isfinite(q)) throw ContractViolation("SpinorParams: q must be finite");
  if (!std::isfinite(t_chi_equivalent) || t_chi_equivalent < 0.0) {
    throw ContractViolation("SpinorParams: t_chi_equivalent must be >= 0");
  }
  if (!std::isfinite(echo_ratio) || echo_ratio < 0.0) throw ContractViolation("SpinorParams: echo_ratio must be >= 0");
  if (!std::isfinite(theta)) throw ContractViolation("SpinorParams: theta must be finite");
}

SpinorHamiltonian::SpinorHamiltonian(std::shared_ptr<const ThreeModeSystem> system, Matrix matrix)
    : system_(std::move(system)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != system_->dim() || matrix_.cols() != system_->dim()) {
    throw StructuralError("SpinorHamiltonian: matrix does not match the basis");
  }
  matrix_.makeCompressed();
}

Eigen::VectorXcd SpinorHamiltonian::apply(const Eigen::VectorXcd& v) const {
  if (v.size() != matrix_.cols()) throw StructuralError("SpinorHamiltonian::apply: dimension mismatch");
  Eigen::VectorXcd out(matrix_.rows());
  const int* outer = matrix_.outerIndexPtr();
  const int* inner = matrix_.innerIndexPtr();
  const double* values = matrix_.valuePtr();
  for (Eigen::Index r = 0; r < matrix_.rows(); ++r) {
    Complex acc = 0.0;
    for (int p = outer[r]; p < outer[r + 1]; ++p) acc += values[p] * v[inner[p]];
    out[r] = acc;
  }
  return out;
}

Eigen::VectorXcd SpinorHamiltonian::evolve(const Eigen::VectorXcd& v, double scale,
                                           const KrylovOptions& options) const {
  if (v.size() != matrix_.cols()) throw StructuralError("SpinorHamiltonian::evolve: dimension mismatch");
  return krylov_expm([this](const Eigen::VectorXcd& x) { return apply(x); }, v, scale, options);
}

SpinorHamiltonian build_spinor_hamiltonian(std::shared_ptr<const ThreeModeSystem> system,
                                           const SpinorParams& params, SpinorParts parts) {
  params.validate();
  const ThreeModeSystem& s = *system;
  const double lambda = params.lambda;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<size_t>(5 * s.dim()));
  for (Eigen::Index a = 0; a < s.dim(); ++a) {
    const int i = s.n_s(a), k = s.n_a(a), n0 = s.n_0(a);
    double diag = 0.0;
    if (parts.has(SpinorPart::QZ)) diag += params.q * (i + k);
    if (parts.has(SpinorPart::CS)) diag += lambda * (2.0 * n0 - 1.0) * (i + k);
    if (diag != 0.0) entries.emplace_back(a, a, diag);
    if (!parts.has(SpinorPart::FWM)) continue;
    // a0^dag^2 aS^2 |i;k> = sqrt(i(i-1)(n0+1)(n0+2)) |i-2;k>, and the A analogue.
    if (i >= 2) {
      const double c = lambda * std::sqrt(double(i) * (i - 1) * (n0 + 1.0) * (n0 + 2.0));
      const Eigen::Index b = ThreeModeSystem::index(i - 2, k);
      entries.emplace_back(b, a, c);
      entries.emplace_back(a, b, c);
    }
    if (k >= 2) {
      const double c = -lambda * std::sqrt(double(k) * (k - 1) * (n0 + 1.0) * (n0 + 2.0));
      const Eigen::Index b = ThreeModeSystem::index(i, k - 2);
      entries.emplace_back(b, a, c);
      entries.emplace_back(a, b, c);
    }
  }
  SpinorHamiltonian::Matrix m(s.dim(), s.dim());
  m.setFromTriplets(entries.begin(), entries.end());
  return SpinorHamiltonian(std::move(system), std::move(m));
}

Eigen::VectorXcd apply_jy_s(const ThreeModeSystem& s, const Eigen::VectorXcd& v) {
  if (v.size() != s.dim()) throw StructuralError("apply_jy_s: dimension mismatch");
  const Complex half_inv_i(0.0, -0.5);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (Eigen::Index a = 0; a < s.dim(); ++a) {
    const int i = s.n_s(a), k = s.n_a(a), n0 = s.n_0(a);
    if (i >= 1) out[ThreeModeSystem::index(i - 1, k)] += half_inv_i * std::sqrt(double(i) * (n0 + 1)) * v[a];
    if (n0 >= 1) out[ThreeModeSystem::index(i + 1, k)] -= half_inv_i * std::sqrt((i + 1.0) * n0) * v[a];
  }
  return out;
}

Eigen::VectorXcd rotate_y_s(const ThreeModeSystem& s, const Eigen::VectorXcd& v, double angle) {
  if (v.size() != s.dim()) throw StructuralError("rotate_y_s: dimension mismatch");
  Eigen::VectorXcd out = v;
  if (angle == 0.0) return out;
  const int n = s.n_atoms();
  for (int k = 0; k < n; ++k) {
    const int sub_n = n - k;
    Eigen::VectorXcd sub(sub_n + 1);
    for (int i = 0; i <= sub_n; ++i) sub[i] = v[ThreeModeSystem::index(i, k)];
    if (sub.squaredNorm() == 0.0) continue;
    sub = SpinWorkspace::shared(sub_n)->rotate(sub, Axis::Y, angle);
    for (int i = 0; i <= sub_n; ++i) out[ThreeModeSystem::index(i, k)] = sub[i];
  }
  return out;
}

Eigen::VectorXcd side_mode_phase(const ThreeModeSystem& s, const Eigen::VectorXcd& v, double angle) {
  if (v.size() != s.dim()) throw StructuralError("side_mode_phase: dimension mismatch");
  Eigen::VectorXcd out(v.size());
  for (int l = 0, a = 0; l <= s.n_atoms(); ++l) {
    const Complex phase = std::polar(1.0, -angle * l);
    for (int i = 0; i <= l; ++i, ++a) out[a] = phase * v[a];
  }
  return out;
}

Eigen::VectorXd JointModeDistribution::cropped_probabilities() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_atoms + 1);
  for (Eigen::Index a = 0; a < probabilities.size(); ++a) out[n_s[a] + n_a[a]] += probabilities[a];
  return out;
}

double fisher_information(const JointModeDistribution& dist, double floor) {
  double f = 0.0;
  for (Eigen::Index a = 0; a < dist.probabilities.size(); ++a) {
    if (dist.probabilities[a] > floor) f += dist.derivative[a] * dist.derivative[a] / dist.probabilities[a];
  }
  return f;
}

OutcomeDistribution effective_jz3_distribution(const ThreeModeState& state, const Eigen::VectorXcd& derivative) {
  const ThreeModeSystem& s = *state.system;
  if (state.amplitudes.size() != s.dim() || derivative.size() != s.dim()) {
    throw StructuralError("effective_jz3_distribution: dimension mismatch");
  }
  const int n = s.n_atoms();
  OutcomeDistribution d;
  d.eigenvalues.resize(n + 1);
  d.probabilities = Eigen::VectorXd::Zero(n + 1);
  d.derivative = Eigen::VectorXd::Zero(n + 1);
  for (int l = 0, a = 0; l <= n; ++l) {
    d.eigenvalues[l] = 0.5 * (n - 2 * l);
    for (int i = 0; i <= l; ++i, ++a) {
      const Complex psi = state.amplitudes[a];
      d.probabilities[l] += std::norm(psi);
      d.derivative[l] += 2.0 * (std::conj(psi) * derivative[a]).real();
    }
  }
  return d;
}

OutcomeDistribution effective_jz3_distribution(const ThreeModeState& state) {
  return effective_jz3_distribution(state, Eigen::VectorXcd::Zero(state.amplitudes.size()));
}

JointModeDistribution separate_mode_distribution(const ThreeModeState& state, const Eigen::VectorXcd& derivative) {
  const ThreeModeSystem& s = *state.system;
  if (state.amplitudes.size() != s.dim() || derivative.size() != s.dim()) {
    throw StructuralError("separate_mode_distribution: dimension mismatch");
  }
  JointModeDistribution d;
  d.n_atoms = s.n_atoms();
  d.n_s.resize(s.dim());
  d.n_a.resize(s.dim());
  d.probabilities.resize(s.dim());
  d.derivative.resize(s.dim());
  for (Eigen::Index a = 0; a < s.dim(); ++a) {
    d.n_s[a] = s.n_s(a);
    d.n_a[a] = s.n_a(a);
    d.probabilities[a] = std::norm(state.amplitudes[a]);
    d.derivative[a] = 2.0 * (std::conj(state.amplitudes[a]) * derivative[a]).real();
  }
  return d;
}

JointModeDistribution separate_mode_distribution(const ThreeModeState& state) {
  return separate_mode_distribution(state, Eigen::VectorXcd::Zero(state.amplitudes.size()));
}

namespace {

SpinorParts parts_for(SpinorVariant variant) {
  return variant == SpinorVariant::Full ? SpinorParts::all() : SpinorParts::only(SpinorPart::FWM);
}

}  // namespace

SpinorEcho::SpinorEcho(int n_atoms, SpinorParams params, SpinorVariant variant)
    : system_(std::make_shared<const ThreeModeSystem>(n_atoms)),
      params_(params),
      variant_(variant),
      hamiltonian_(build_spinor_hamiltonian(system_, params_, parts_for(variant))) {
  const Eigen::VectorXcd squeezed = hamiltonian_.evolve(ThreeModeState::vacuum(system_).amplitudes, params_.time());
  prepared_ = side_mode_phase(*system_, squeezed, kSpinorAlignmentPhase);
}

Eigen::VectorXcd SpinorEcho::imprint(double theta) const { return rotate_y_s(*system_, prepared_, theta); }

Eigen::VectorXcd SpinorEcho::echo(const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out = side_mode_phase(*system_, v, -kSpinorAlignmentPhase - pi / 2);
  out = hamiltonian_.evolve(out, params_.echo_ratio * params_.time());
  return side_mode_phase(*system_, out, kSpinorAlignmentPhase + pi / 2);
}

Eigen::VectorXcd SpinorEcho::downstream(const Eigen::VectorXcd& v) const {
  return rotate_y_s(*system_, echo(v), pi / 2);
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> SpinorEcho::final_with_derivative(double theta) const {
  const Eigen::VectorXcd psi = imprint(theta);
  const Eigen::VectorXcd dpsi = Complex(0.0, -1.0) * apply_jy_s(*system_, psi);
  return {downstream(psi), downstream(dpsi)};
}

OutcomeDistribution SpinorEcho::cropped_distribution(double theta) const {
  auto [psi, dpsi] = final_with_derivative(theta);
  return effective_jz3_distribution({system_, std::move(psi)}, dpsi);
}

JointModeDistribution SpinorEcho::separate_distribution(double theta) const {
  auto [psi, dpsi] = final_with_derivative(theta);
  return separate_mode_distribution({system_, std::move(psi)}, dpsi);
}

double SpinorEcho::fisher(double theta, SpinorMeasurement measurement, const DetectionModel& noise) const {
  noise.validate();
  if (measurement == SpinorMeasurement::Separate) {
    if (noise.kind != NoiseKind::None) {
      throw ContractViolation("SpinorEcho::fisher: detection noise is defined for the cropped readout only");
    }
    return fisher_information(separate_distribution(theta));
  }
  return fisher_information(cropped_distribution(theta), noise, system_->n_atoms());
}

SpinorEchoResult run_spinor_echo(int n_atoms, const SpinorParams& params, SpinorVariant variant,
                                 SpinorMeasurement measurement) {
  const SpinorEcho echo(n_atoms, params, variant);
  const Eigen::VectorXcd psi = echo.imprint(params.theta);
  const Eigen::VectorXcd dpsi = Complex(0.0, -1.0) * apply_jy_s(echo.system(), psi);
  const Eigen::VectorXcd echoed = echo.echo(psi);
  const auto system = echo.system_ptr();
  SpinorEchoResult result{{system, echoed},
                          {system, rotate_y_s(*system, echoed, pi / 2)},
                          {},
                          {},
                          0.0};
  const Eigen::VectorXcd dfinal = echo.downstream(dpsi);
  result.cropped = effective_jz3_distribution(result.final_state, dfinal);
  if (measurement == SpinorMeasurement::Separate) {
    result.separate = separate_mode_distribution(result.final_state, dfinal);
    result.fisher_information = fisher_information(result.separate);
  } else {
    result.fisher_information = fisher_information(result.cropped);
  }
  return result;
}

const char* to_string(SpinorVariant variant) noexcept {
  return variant == SpinorVariant::Full ? "full" : "fwm_only";
}

const char* to_string(SpinorMeasurement measurement) noexcept {
  return measurement == SpinorMeasurement::Cropped ? "cropped" : "separate";
}

}  // namespace twistecho
