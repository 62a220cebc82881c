// Acceptance suite. Usage: acceptance [criterion ...]
// A criterion is "1".."10" (all of its checks) or "<n>.<check>" for a single
// check. Prints one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "twistecho/echo.hpp"
#include "twistecho/figures.hpp"
#include "twistecho/oat_opt.hpp"
#include "twistecho/one_mode.hpp"
#include "twistecho/runner.hpp"
#include "twistecho/spinor.hpp"

using namespace twistecho;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

struct Check {
  std::string name;
  std::function<Result()> run;
};

struct Criterion {
  std::string title;
  std::vector<Check> checks;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double db(double x) { return 10.0 * std::log10(x); }

EchoSpec echo_spec(Protocol p, int n, double t_chi, double r, double theta = 1e-3) {
  EchoSpec s;
  s.protocol = p;
  s.n_atoms = n;
  s.t_chi = t_chi;
  s.echo_ratio = r;
  s.theta = theta;
  return s;
}

double noisy_optimum(Protocol p, int n, double t_chi, double r, const DetectionModel& noise) {
  return optimize_phase(echo_spec(p, n, t_chi, r), noise).fisher;
}

double gain_from_config(RunConfig c) { return run(c, 1).at(0).gain_db; }

// -- 1 ----------------------------------------------------------------------

Result closed_forms() {
  double worst = 0.0;
  for (double gamma : {0.0, 0.3, 1.0, 2.5})
    for (double r : {0.0, 0.5, 1.0, 2.0})
      for (double phi : {1e-3, 0.02}) {
        const OneModeParams p{1000, gamma, phi, r, 7.0};
        worst = std::max(worst, rel(ideal_phase_variance(p), std::exp(-2 * gamma) / 1000));
        worst = std::max(worst, rel(one_mode_magnification(p), std::exp(r * gamma)));
        worst = std::max(worst, rel(one_mode_snr(p), 2 * phi * std::exp(gamma)));
        const double noisy = std::exp(-2 * gamma) / 1000 + 4 * 49.0 / (1e6 * std::exp(2 * r * gamma));
        worst = std::max(worst, rel(noisy_phase_variance(p), noisy));
      }
  return {worst < 1e-12, fmt("max relative deviation from closed forms %.2e (limit 1e-12)", worst)};
}

Result two_mode_agreement() {
  const int n = 1000;
  double worst_m = 0, worst_snr = 0, worst_f = 0;
  for (double gamma : {0.3, 0.6, 0.9, 1.15})
    for (double r : {0.0, 0.5, 1.0, 1.5, 2.0}) {
      const EchoSpec s = echo_spec(Protocol::TactEcho, n, gamma / n, r);
      const OneModeParams p = OneModeParams::from_two_mode(n, s.t_chi, s.theta, r);
      worst_m = std::max(worst_m, rel(magnification_factor(s), one_mode_magnification(p)));
      worst_snr = std::max(worst_snr, rel(signal_to_noise(s), one_mode_snr(p)));
      const double f = EchoSequence(s).fisher(s.theta, DetectionModel::none());
      worst_f = std::max(worst_f, rel(f, 1.0 / ideal_phase_variance(p)));
    }
  const double worst = std::max({worst_m, worst_snr, worst_f});
  return {worst <= 0.05, fmt("N=1000, gamma<=1.15, r in [0,2]: max deviation M %.2f%%, SNR %.2f%%, F %.2f%% (limit 5%%)",
                             100 * worst_m, 100 * worst_snr, 100 * worst_f)};
}

// -- 2 ----------------------------------------------------------------------

Result fidelities() {
  const SpinSystem s(100);
  const double t6 = calibrate_twisting(s, Twisting::TACT, -6.0);
  const double topt = optimal_twisting(s).t_chi;
  const double f1 = css_fidelity(run_echo(echo_spec(Protocol::TactEcho, 100, t6, 1, 0.2))[2].state).fidelity;
  const double f2 = css_fidelity(run_echo(echo_spec(Protocol::TactEcho, 100, topt, 1, 0.02))[2].state).fidelity;
  const bool ok = std::abs(f1 - 0.998) <= 0.002 && std::abs(f2 - 0.814) <= 0.005;
  return {ok, fmt("-6 dB: %.4f (0.998 +- 0.002); optimal: %.4f (0.814 +- 0.005)", f1, f2)};
}

// -- 3 ----------------------------------------------------------------------

RunConfig fig4_config(RunProtocol p) {
  RunConfig c;
  c.protocol = p;
  c.n_atoms = 1000;
  c.squeezing_db = -6.0;
  c.theta_policy = ThetaPolicy::Optimize;
  return c;
}

Result strong_echo_gain() {
  RunConfig c = fig4_config(RunProtocol::TactEcho);
  c.echo_ratio = 3.0;
  c.noise = DetectionModel::css_level();
  const double g = gain_from_config(c);
  return {g >= 5.0, fmt("TACT r=3, sigma_CSS: gain %.3f dB (>= 5 dB)", g)};
}

std::vector<ResultRow> echo_ratio_sweep(RunProtocol p) {
  RunConfig c = fig4_config(p);
  c.noise = DetectionModel::constant(10.0);
  c.sweep = Sweep{"echo_ratio", {}};
  for (int i = 0; i <= 30; ++i) c.sweep->values.push_back(0.1 * i);
  return run(c, 0);
}

Result tact_monotone_in_r() {
  const auto rows = echo_ratio_sweep(RunProtocol::TactEcho);
  double worst_step = 1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) worst_step = std::min(worst_step, rows[i].gain_db - rows[i - 1].gain_db);
  return {rows.size() == 31 && worst_step >= 0.0,
          fmt("TACT sigma=10, %zu rows r=0..3: smallest step %.4f dB (>= 0), gain %.2f -> %.2f dB", rows.size(),
              worst_step, rows.front().gain_db, rows.back().gain_db)};
}

Result oat_interior_optimum() {
  const auto rows = echo_ratio_sweep(RunProtocol::OatEcho);
  std::size_t best = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].gain_db > rows[best].gain_db) best = i;
  const bool interior = best > 0 && best + 1 < rows.size() && rows[best].gain_db > rows.front().gain_db &&
                        rows[best].gain_db > rows.back().gain_db;
  return {interior, fmt("OAT sigma=10: maximum %.2f dB at r=%.1f (ends %.2f / %.2f dB)", rows[best].gain_db,
                        rows[best].echo_ratio, rows.front().gain_db, rows.back().gain_db)};
}

// -- 4 ----------------------------------------------------------------------

Result qfi_maximizer() {
  std::string detail;
  bool ok = true;
  for (int n : {100, 1000}) {
    const OptimalTwisting o = optimal_twisting(SpinSystem(n));
    const double twin_fock = 0.5 * n * n + n;
    const double off = rel(o.t_chi, optimal_twisting_seed(n));
    ok = ok && off <= 0.15 && o.f_q > twin_fock;
    detail += fmt("N=%d: t_opt %.4e vs ln(2piN)/2N %.4e (%.1f%%), F_Q/N^2 %.3f > twin-Fock %.3f; ", n, o.t_chi,
                  o.seed, 100 * off, o.f_q / (double(n) * n), twin_fock / (double(n) * n));
  }
  return {ok, detail};
}

Result heisenberg_fraction() {
  const int n = 100;
  const double t = optimal_twisting(SpinSystem(n)).t_chi;
  const double f = noisy_optimum(Protocol::TactEcho, n, t, 1.0, DetectionModel::none());
  const double frac = std::sqrt(f) / n;
  return {frac >= 0.75, fmt("N=100 optimal echo: sqrt(F)/N = %.4f (>= 0.75)", frac)};
}

// -- 5 ----------------------------------------------------------------------

struct OptimalRegime {
  int n = 1000;
  double t_tact = 0, t_oat = 0;
  OptimalRegime() {
    t_tact = optimal_twisting(SpinSystem(n)).t_chi;
    t_oat = 1.0 / std::sqrt(double(n));
  }
};

const OptimalRegime& regime() {
  static const OptimalRegime r;
  return r;
}

Result no_echo_fragile() {
  const auto& g = regime();
  const double f0 = noisy_optimum(Protocol::TactEcho, g.n, g.t_tact, 0.0, DetectionModel::none());
  const double f1 = noisy_optimum(Protocol::TactEcho, g.n, g.t_tact, 0.0, DetectionModel::constant(1.0));
  return {db(f0 / f1) > 3.0, fmt("r=0: F %.4g -> %.4g from sigma 0 to 1, drop %.2f dB (> 3 dB)", f0, f1, db(f0 / f1))};
}

Result echo_retains() {
  const auto& g = regime();
  const double f0 = noisy_optimum(Protocol::TactEcho, g.n, g.t_tact, 1.0, DetectionModel::none());
  const double fc = noisy_optimum(Protocol::TactEcho, g.n, g.t_tact, 1.0, DetectionModel::css_level());
  return {fc / f0 >= 0.5, fmt("TACT r=1: F(sigma_CSS)/F(0) = %.4g/%.4g = %.3f (>= 0.5)", fc, f0, fc / f0)};
}

Result tact_flat_in_r() {
  const auto& g = regime();
  double lo = 1e300, hi = 0;
  std::string values;
  for (double r : {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}) {
    const double f = noisy_optimum(Protocol::TactEcho, g.n, g.t_tact, r, DetectionModel::constant(10.0));
    lo = std::min(lo, f);
    hi = std::max(hi, f);
    values += fmt(" %.3g", f);
  }
  const double spread = (hi - lo) / hi;
  return {spread <= 0.2, fmt("TACT sigma=10, r=0.5..2 step 0.25: F~ =%s; spread %.1f%% (<= 20%%)", values.c_str(),
                             100 * spread)};
}

Result oat_sharp_peak() {
  const auto& g = regime();
  std::map<double, double> f;
  for (double r : {0.8, 0.9, 0.95, 1.0, 1.05, 1.1, 1.2})
    f[r] = noisy_optimum(Protocol::OatEcho, g.n, g.t_oat, r, DetectionModel::constant(10.0));
  double best_r = 0;
  for (const auto& [r, v] : f)
    if (best_r == 0 || v > f[best_r]) best_r = r;
  const double peak = f[best_r];
  const bool ok = std::abs(best_r - 1.0) <= 0.05 && f[0.9] <= 0.75 * peak && f[1.1] <= 0.75 * peak;
  return {ok, fmt("OAT sigma=10: peak %.4g at r=%.2f; F~(0.9)/peak %.2f, F~(1.1)/peak %.2f (<= 0.75)", peak, best_r,
                  f[0.9] / peak, f[1.1] / peak)};
}

// -- 6 ----------------------------------------------------------------------

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

Result scaling() {
  const std::vector<double> sizes = {100, 200, 400, 800, 1600};
  std::vector<double> echo, plain;
  for (double nd : sizes) {
    const int n = static_cast<int>(nd);
    const double t = optimal_twisting(SpinSystem(n)).t_chi;
    const auto noise = DetectionModel::sqrt_n_scaled(0.1);
    echo.push_back(noisy_optimum(Protocol::TactEcho, n, t, 1.0, noise));
    plain.push_back(noisy_optimum(Protocol::TactEcho, n, t, 0.0, noise));
  }
  const double s_echo = slope(sizes, echo);
  const std::vector<double> top(sizes.begin() + 1, sizes.end());
  const std::vector<double> top_plain(plain.begin() + 1, plain.end());
  const double s_plain = slope(top, top_plain);
  return {s_echo >= 1.85 && s_echo <= 2.05 && s_plain <= 1.3,
          fmt("slope TACT r=1 %.3f (in [1.85, 2.05]); no echo over N=200..1600 %.3f (<= 1.3)", s_echo, s_plain)};
}

// -- 7 ----------------------------------------------------------------------

Result breakdown() {
  const OneModeBreakdown a = find_one_mode_breakdown(100);
  const OneModeBreakdown b = find_one_mode_breakdown(1000);
  const bool ok = std::abs(a.xi_db + 7.6) <= 1.0 && std::abs(b.xi_db + 15.8) <= 1.0;
  return {ok, fmt("5%% deviation at xi_R^2 = %.2f dB (N=100, -7.6 +- 1) and %.2f dB (N=1000, -15.8 +- 1)", a.xi_db,
                  b.xi_db)};
}

// -- 8 ----------------------------------------------------------------------

constexpr int kSpinorAtoms = 300;
constexpr double kSpinorTheta = 1e-3;

double spinor_t_chi(double target_db) { return calibrate_twisting(SpinSystem(kSpinorAtoms), Twisting::TACT, target_db); }

SpinorParams spinor_params(double t_chi, double r, SpinorVariant v) {
  SpinorParams p;
  p.q = v == SpinorVariant::Full ? SpinorParams::compensating_q(kSpinorAtoms, p.lambda) : 0.0;
  p.t_chi_equivalent = t_chi;
  p.echo_ratio = r;
  p.theta = kSpinorTheta;
  return p;
}

Result spinor_tracks_two_mode() {
  const double t = spinor_t_chi(-10.0);
  const SpinorEcho echo(kSpinorAtoms, spinor_params(t, 1.0, SpinorVariant::Full), SpinorVariant::Full);
  const double f = echo.fisher(kSpinorTheta, SpinorMeasurement::Cropped, DetectionModel::none());
  const double two =
      EchoSequence(echo_spec(Protocol::TactEcho, kSpinorAtoms, t, 1.0, kSpinorTheta)).fisher(kSpinorTheta, {});
  return {f >= 0.8 * two, fmt("N=300, -10 dB, r=1: cropped %.1f vs two-mode %.1f (%.1f%%, >= 80%%)", f, two,
                              100 * f / two)};
}

Result spinor_ordering() {
  bool ok = true;
  std::string detail;
  for (double target : {-6.0, -10.0}) {
    const double t = spinor_t_chi(target);
    const SpinorEcho fwm(kSpinorAtoms, spinor_params(t, 1.0, SpinorVariant::FwmOnly), SpinorVariant::FwmOnly);
    const SpinorEcho full(kSpinorAtoms, spinor_params(t, 1.0, SpinorVariant::Full), SpinorVariant::Full);
    const double a = fwm.fisher(kSpinorTheta, SpinorMeasurement::Separate, {});
    const double b = full.fisher(kSpinorTheta, SpinorMeasurement::Separate, {});
    const double c = full.fisher(kSpinorTheta, SpinorMeasurement::Cropped, {});
    ok = ok && a >= b && b >= c;
    detail += fmt("%g dB: fwm_only %.1f >= separate %.1f >= cropped %.1f; ", target, a, b, c);
  }
  return {ok, detail};
}

Result spinor_echo_gain() {
  const double t = spinor_t_chi(-10.0);
  double f[2];
  for (int i = 0; i < 2; ++i) {
    const double r = i;
    const SpinorEcho echo(kSpinorAtoms, spinor_params(t, r, SpinorVariant::Full), SpinorVariant::Full);
    f[i] = echo.fisher(kSpinorTheta, SpinorMeasurement::Cropped, DetectionModel::css_level());
  }
  return {db(f[1] / f[0]) >= 5.0,
          fmt("N=300, -10 dB, sigma_CSS: r=1 %.1f vs r=0 %.1f, %.2f dB (>= 5 dB)", f[1], f[0], db(f[1] / f[0]))};
}

// -- 9 ----------------------------------------------------------------------

Eigen::VectorXcd random_state(int dim, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(dim);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v.normalized();
}

Result properties() {
  std::mt19937 rng(9);
  double norm_err = 0, herm_err = 0, echo_err = 0, deriv_err = 0, fq_excess = 0, oracle_err = 0, binom_err = 0,
         assembly_err = 0;
  bool smear_monotone = true;

  for (int n : {1, 2, 5, 8}) {
    const SpinSystem s(n);
    const auto ws = SpinWorkspace::shared(n);
    for (auto kind : {Twisting::TACT, Twisting::OAT}) {
      const Eigen::MatrixXcd h = ws->twisting(kind).to_dense();
      herm_err = std::max(herm_err, (h - h.adjoint()).cwiseAbs().maxCoeff());
      const Eigen::VectorXcd v = random_state(s.dim(), rng);
      const Eigen::VectorXcd out = ws->twist(v, kind, 0.37);
      norm_err = std::max(norm_err, std::abs(out.norm() - 1.0));
      oracle_err = std::max(oracle_err, (out - oracle::evolve_dense(h, v, 0.37)).norm());
    }
    for (auto [axis, dense] : {std::pair{Axis::X, oracle::jx(n)}, std::pair{Axis::Y, oracle::jy(n)}}) {
      const Eigen::VectorXcd v = random_state(s.dim(), rng);
      oracle_err = std::max(oracle_err, (ws->rotate(v, axis, 1.1) - oracle::evolve_dense(dense, v, 1.1)).norm());
    }
  }

  for (auto p : {Protocol::TactEcho, Protocol::OatEcho}) {
    const auto stages = run_echo(echo_spec(p, 60, 0.02, 1.0, 0.0));
    const DickeState pole = DickeState::pole(stages[0].state.system());
    echo_err = std::max(echo_err, 1.0 - stages[2].state.fidelity(pole));
    const EchoSequence seq(echo_spec(p, 100, 0.01, 1.3));
    const OutcomeDistribution d = seq.distribution(0.2);
    for (Eigen::Index k = 0; k < d.probabilities.size(); k += 7) {
      const double fd = oracle::central_difference([&](double t) { return seq.distribution(t).probabilities(k); },
                                                   0.2, 1e-5);
      deriv_err = std::max(deriv_err, std::abs(fd - d.derivative(k)));
    }
    for (double t : {0.005, 0.02, 0.05}) {
      const EchoSequence q(echo_spec(p, 50, t, 1.0));
      const double f = q.fisher(0.1, {});
      const double fq = quantum_fisher_information(DickeState(q.system(), q.prepared())).generator_y;
      fq_excess = std::max(fq_excess, (f - fq) / fq);
    }
  }

  const EchoSequence seq(echo_spec(Protocol::TactEcho, 100, 0.01, 1.0, 0.05));
  const OutcomeDistribution d = seq.distribution(0.05);
  double previous = 1e300;
  for (double sigma : {0.3, 1.0, 3.0, 10.0, 30.0}) {
    const double f = noisy_fisher_information(smear(d, sigma));
    smear_monotone = smear_monotone && f <= previous * (1 + 1e-9);
    previous = f;
  }

  for (int n : {10, 100, 1000}) {
    const EchoSequence css(echo_spec(Protocol::TactEcho, n, 0.0, 0.0, 0.0));
    const OutcomeDistribution dd = css.distribution(0.3);
    // imprint then readout pulse: each atom lands in the lower level with (1 + sin theta) / 2
    const double q = 0.5 * (1.0 + std::sin(0.3));
    for (Eigen::Index k = 0; k <= n; ++k)
      binom_err = std::max(binom_err, std::abs(dd.probabilities(k) - oracle::binomial_pmf(n, int(k), q)));
    // untruncated sum: the default probability floor drops ~1e-12 of the tail at N = 1000
    binom_err = std::max(binom_err, rel(fisher_information(dd, 0.0), n));
  }

  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const OneModeParams p{1000, 2 * u(rng), 0.5 * u(rng), 3 * u(rng)};
    assembly_err = std::max(assembly_err, rel(assembled_phase_variance(p), ideal_phase_variance(p)));
  }

  const bool ok = norm_err < 1e-12 && herm_err < 1e-13 && echo_err < 1e-12 && deriv_err < 1e-6 &&
                  fq_excess < 1e-9 && smear_monotone && oracle_err < 1e-9 && binom_err < 1e-12 &&
                  assembly_err < 1e-12;
  return {ok, fmt("norm %.1e, hermiticity %.1e, echo identity %.1e, dP %.1e, F-F_Q %.1e, smearing %s, "
                  "dense oracle %.1e, binomial %.1e, assembly %.1e",
                  norm_err, herm_err, echo_err, deriv_err, fq_excess, smear_monotone ? "monotone" : "NOT monotone",
                  oracle_err, binom_err, assembly_err)};
}

// -- 10 ---------------------------------------------------------------------

Result dominance() {
  const int n = 1000;
  double worst = 0;
  std::string where;
  int points = 0;
  for (double t : {3e-4, 8e-4, 1.5e-3, 3e-3, 4.4e-3})
    for (double r : {0.5, 1.0, 1.5, 2.0, 3.0})
      for (double sigma : {0.0, 1.0, std::sqrt(double(n)) / 2, 30.0}) {
        const DetectionModel m = sigma == 0 ? DetectionModel::none() : DetectionModel::constant(sigma);
        const double tact = noisy_optimum(Protocol::TactEcho, n, t, r, m);
        OatOptimizationSpec o;
        o.base = echo_spec(Protocol::OatEcho, n, t, r);
        for (auto [align, readout] : {std::pair{true, false}, std::pair{false, true}, std::pair{true, true}}) {
          o.optimize_alignment = align;
          o.optimize_readout = readout;
          const double ratio = optimize_phase(resolve(o), m).fisher / tact;
          if (ratio > worst) {
            worst = ratio;
            where = fmt("t_chi=%g r=%g sigma=%g align=%d readout=%d", t, r, sigma, align, readout);
          }
        }
        ++points;
      }
  return {points >= 100 && worst <= 1.02,
          fmt("%d points: largest OAT-variant/TACT ratio %.4f at %s (<= 1.02)", points, worst, where.c_str())};
}

Result alignment_keeps_magnification() {
  const int n = 1000;
  const double t = calibrate_twisting(SpinSystem(n), Twisting::OAT, -10.0);
  double worst = 0;
  std::string values;
  for (double r : {0.5, 1.0, 2.0}) {
    OatOptimizationSpec o;
    o.base = echo_spec(Protocol::OatEcho, n, t, r);
    o.optimize_alignment = true;
    const double clean = magnification_factor(o.base);
    const double aligned = magnification_factor(resolve(o));
    worst = std::max(worst, rel(aligned, clean));
    values += fmt(" r=%g: %.5f vs %.5f;", r, aligned, clean);
  }
  return {worst <= 1e-6, fmt("N=1000, -10 dB:%s max relative change %.2e (<= 1e-6)", values.c_str(), worst)};
}

std::map<int, Criterion> criteria() {
  return {
      {1, {"one-mode closed forms", {{"closed_forms", closed_forms}, {"two_mode", two_mode_agreement}}}},
      {2, {"CSS fidelities", {{"fidelity", fidelities}}}},
      {3,
       {"squeezing-regime robustness",
        {{"strong_echo", strong_echo_gain}, {"tact_monotone", tact_monotone_in_r}, {"oat_optimum", oat_interior_optimum}}}},
      {4, {"optimal performance", {{"qfi", qfi_maximizer}, {"heisenberg", heisenberg_fraction}}}},
      {5,
       {"noise robustness at the optimum",
        {{"no_echo", no_echo_fragile},
         {"retention", echo_retains},
         {"tact_flat", tact_flat_in_r},
         {"oat_peak", oat_sharp_peak}}}},
      {6, {"scaling with atom number", {{"slopes", scaling}}}},
      {7, {"one-mode breakdown thresholds", {{"thresholds", breakdown}}}},
      {8,
       {"spinor implementation",
        {{"tracks", spinor_tracks_two_mode}, {"ordering", spinor_ordering}, {"echo_gain", spinor_echo_gain}}}},
      {9, {"property suites", {{"properties", properties}}}},
      {10, {"OAT optimizations", {{"dominance", dominance}, {"magnification", alignment_keeps_magnification}}}},
  };
}

}  // namespace

int main(int argc, char** argv) {
  const auto all = criteria();
  std::vector<std::pair<int, std::string>> wanted;  // empty check name: whole criterion
  if (argc == 1)
    for (const auto& [id, c] : all) wanted.emplace_back(id, "");
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    const auto dot = arg.find('.');
    const int id = std::atoi(arg.substr(0, dot).c_str());
    if (!all.count(id)) {
      std::fprintf(stderr, "unknown criterion %s\n", arg.c_str());
      return 2;
    }
    wanted.emplace_back(id, dot == std::string::npos ? "" : arg.substr(dot + 1));
  }

  bool all_pass = true;
  for (const auto& [id, check_name] : wanted) {
    const Criterion& c = all.at(id);
    bool pass = true, found = false;
    std::vector<std::string> lines;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& check : c.checks) {
      if (!check_name.empty() && check.name != check_name) continue;
      found = true;
      Result r;
      try {
        r = check.run();
      } catch (const std::exception& e) {
        r = {false, std::string("exception: ") + e.what()};
      }
      pass = pass && r.pass;
      lines.push_back(fmt("    [%s] %s: %s", r.pass ? "ok" : "FAIL", check.name.c_str(), r.detail.c_str()));
    }
    if (!found) {
      std::fprintf(stderr, "unknown check %d.%s\n", id, check_name.c_str());
      return 2;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string label = check_name.empty() ? std::to_string(id) : std::to_string(id) + "." + check_name;
    std::printf("criterion %s %s: %s (%.1f s)\n", label.c_str(), c.title.c_str(), pass ? "PASS" : "FAIL", seconds);
    for (const auto& l : lines) std::printf("%s\n", l.c_str());
    std::fflush(stdout);
    all_pass = all_pass && pass;
  }
  return all_pass ? 0 : 1;
}
