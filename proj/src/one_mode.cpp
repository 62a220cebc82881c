#include "twistecho/one_mode.hpp"

#include <cmath>
#include <string>

#include "twistecho/echo.hpp"
#include "twistecho/errors.hpp"

namespace twistecho {

OneModeParams OneModeParams::from_two_mode(int n_atoms, double t_chi, double theta, double echo_ratio,
                                           double sigma) {
  OneModeParams p{n_atoms, t_chi * n_atoms, theta * std::sqrt(static_cast<double>(n_atoms)) / 2, echo_ratio, sigma};
  p.validate();
  return p;
}

void OneModeParams::validate() const {
  if (n_atoms < 1) throw ContractViolation("OneModeParams: n_atoms must be positive");
  if (!std::isfinite(gamma) || !std::isfinite(phi) || !std::isfinite(echo_ratio) || !std::isfinite(sigma)) {
    throw ContractViolation("OneModeParams: parameters must be finite");
  }
  if (sigma < 0.0) throw ContractViolation("OneModeParams: sigma must be >= 0");
}

namespace {

void check_window(double exponent) {
  if (std::abs(exponent) > kOneModeExponentLimit) {
    throw OutOfWindowError("one-mode model: exponent " + std::to_string(exponent) + " outside |x| <= " +
                           std::to_string(kOneModeExponentLimit));
  }
}

}  // namespace

double ideal_phase_variance(const OneModeParams& p) {
  p.validate();
  return std::exp(-2.0 * p.gamma) / p.n_atoms;
}

double noisy_phase_variance(const OneModeParams& p) {
  p.validate();
  check_window(p.echo_ratio * p.gamma);
  const double n = p.n_atoms;
  return std::exp(-2.0 * p.gamma) / n + 4.0 * p.sigma * p.sigma / (n * n * std::exp(2.0 * p.echo_ratio * p.gamma));
}

double one_mode_magnification(const OneModeParams& p) {
  p.validate();
  check_window(p.echo_ratio * p.gamma);
  return std::exp(p.echo_ratio * p.gamma);
}

double one_mode_snr(const OneModeParams& p) {
  p.validate();
  check_window(p.gamma);
  return 2.0 * p.phi * std::exp(p.gamma);
}

OneModeMoments appendix_a_moments(const OneModeParams& p) {
  p.validate();
  check_window(p.gamma);
  check_window(p.echo_ratio * p.gamma);
  const double mu1 = std::cosh(p.gamma), nu1 = std::sinh(p.gamma);
  const double mu2 = std::cosh(p.echo_ratio * p.gamma), nu2 = std::sinh(p.echo_ratio * p.gamma);
  const double phi2 = p.phi * p.phi;
  OneModeMoments m;
  m.mean_bdag = p.phi * std::exp(p.echo_ratio * p.gamma);
  const double c = mu1 * nu2 - nu1 * mu2;
  m.n_b = c * c + phi2 * (mu2 + nu2) * (mu2 + nu2);
  m.bdag_sq = (phi2 - mu1 * nu1) * (mu2 * mu2 + nu2 * nu2) + (mu1 * mu1 + nu1 * nu1 + 2.0 * phi2) * mu2 * nu2;
  return m;
}

double assembled_phase_variance(const OneModeParams& p) {
  const OneModeMoments m = appendix_a_moments(p);
  const double quad_mean = 2.0 * m.mean_bdag.real();
  const double numerator = 2.0 * m.bdag_sq + 2.0 * m.n_b + 1.0 - quad_mean * quad_mean;
  return numerator / (p.n_atoms * std::exp(2.0 * p.echo_ratio * p.gamma));
}

namespace {

struct BreakdownSample {
  double deviation;
  double xi_db;
};

BreakdownSample breakdown_sample(int n, double gamma) {
  constexpr double kTheta = 1e-4;
  EchoSpec spec;
  spec.n_atoms = n;
  spec.t_chi = gamma / n;
  const EchoSequence seq(spec);
  const double f = seq.fisher(kTheta, DetectionModel::none());
  const double xi_db = squeezing_parameter(DickeState(seq.system(), seq.prepared())).db;
  return {std::abs(f * std::exp(-2.0 * gamma) / n - 1.0), xi_db};
}

}  // namespace

OneModeBreakdown find_one_mode_breakdown(int n_atoms, double deviation) {
  if (n_atoms < 2) throw ContractViolation("find_one_mode_breakdown: N must be >= 2");
  if (!(deviation > 0.0)) throw ContractViolation("find_one_mode_breakdown: deviation must be positive");
  const double step = 0.02;
  double lo = 0.0;
  double hi = -1.0;
  for (double g = step; g <= 10.0; g += step) {
    if (breakdown_sample(n_atoms, g).deviation > deviation) {
      hi = g;
      break;
    }
    lo = g;
  }
  if (hi < 0.0) throw OutOfWindowError("find_one_mode_breakdown: no breakdown for gamma <= 10");
  while (hi - lo > 1e-5) {
    const double mid = 0.5 * (lo + hi);
    (breakdown_sample(n_atoms, mid).deviation > deviation ? hi : lo) = mid;
  }
  const double g = 0.5 * (lo + hi);
  const BreakdownSample s = breakdown_sample(n_atoms, g);
  return {g, g / n_atoms, s.xi_db, -20.0 * g / std::log(10.0), s.deviation};
}

}  // namespace twistecho
