#include "twistecho/figures.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "twistecho/one_mode.hpp"
#include "twistecho/optimize.hpp"

namespace twistecho {

namespace {

int capped(int n, const FigureOptions& o) { return o.max_n ? std::min(n, *o.max_n) : n; }

RunConfig point(RunProtocol protocol, int n) {
  RunConfig c;
  c.protocol = protocol;
  c.n_atoms = n;
  return c;
}

RunConfig& with_db(RunConfig& c, double db) {
  c.squeezing_db = db;
  return c;
}

RunConfig& with_sweep(RunConfig& c, std::string parameter, std::vector<double> values) {
  c.sweep = Sweep{std::move(parameter), std::move(values)};
  return c;
}

std::vector<double> range(double start, double stop, double step) {
  std::vector<double> v;
  const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) v.push_back(start + i * step);
  return v;
}

const std::vector<double> kNoiseAxis = logspace(0.1, 100.0, 16);
const std::vector<double> kEchoAxis = range(0.0, 3.0, 0.1);

std::vector<FigurePanel> fig3(const FigureOptions& o) {
  const int n = capped(1000, o);
  auto series = [&](const std::string& parameter, const std::vector<double>& values) {
    std::vector<RunConfig> out;
    for (auto p : {RunProtocol::TactEcho, RunProtocol::OatEcho, RunProtocol::OneMode}) {
      RunConfig c = point(p, n);
      c.theta = 1e-3;
      c.echo_ratio = 1.0;
      with_db(c, -10.0);
      out.push_back(with_sweep(c, parameter, values));
    }
    return out;
  };
  const auto squeezing = series("squeezing_db", range(-10.0, -0.5, 0.5));
  const auto echo = series("echo_ratio", kEchoAxis);
  return {{"fig3a_magnification_vs_squeezing", squeezing},
          {"fig3b_snr_vs_squeezing", squeezing},
          {"fig3c_magnification_vs_echo_ratio", echo},
          {"fig3d_snr_vs_echo_ratio", echo}};
}

std::vector<FigurePanel> fig4(const FigureOptions& o) {
  const int n = capped(1000, o);
  std::vector<FigurePanel> panels;
  for (auto protocol : {RunProtocol::TactEcho, RunProtocol::OatEcho}) {
    const bool tact = protocol == RunProtocol::TactEcho;
    auto base = [&](RunProtocol p) {
      RunConfig c = point(p, n);
      with_db(c, -6.0);
      return c;
    };
    FigurePanel phase{tact ? "fig4a_tact_gain_vs_theta" : "fig4d_oat_gain_vs_theta", {}};
    FigurePanel noise{tact ? "fig4b_tact_gain_vs_sigma" : "fig4e_oat_gain_vs_sigma", {}};
    FigurePanel echo{tact ? "fig4c_tact_gain_vs_echo_ratio" : "fig4f_oat_gain_vs_echo_ratio", {}};
    for (double r : {0.0, 0.5, 1.0, 2.0, 3.0}) {
      RunConfig c = base(protocol);
      c.echo_ratio = r;
      c.noise = DetectionModel::css_level();
      phase.series.push_back(with_sweep(c, "theta", range(0.001, 0.05, 0.001)));
      RunConfig d = base(protocol);
      d.echo_ratio = r;
      d.theta_policy = ThetaPolicy::Optimize;
      d.noise = DetectionModel::constant(1.0);
      noise.series.push_back(with_sweep(d, "sigma", kNoiseAxis));
      if (tact) {
        RunConfig m = base(RunProtocol::OneMode);
        m.echo_ratio = r;
        m.noise = DetectionModel::constant(1.0);
        noise.series.push_back(with_sweep(m, "sigma", kNoiseAxis));
      }
    }
    for (double sigma : {0.0, 10.0}) {
      RunConfig c = base(protocol);
      c.theta_policy = ThetaPolicy::Optimize;
      if (sigma > 0) c.noise = DetectionModel::constant(sigma);
      echo.series.push_back(with_sweep(c, "echo_ratio", kEchoAxis));
    }
    panels.push_back(std::move(phase));
    panels.push_back(std::move(noise));
    panels.push_back(std::move(echo));
  }
  std::sort(panels.begin(), panels.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return panels;
}

std::vector<FigurePanel> fig5(const FigureOptions& o) {
  const int n = capped(1000, o);
  FigurePanel noise{"fig5a_fisher_vs_sigma", {}};
  FigurePanel clean{"fig5b_fisher_vs_echo_ratio_sigma0", {}};
  FigurePanel noisy{"fig5c_fisher_vs_echo_ratio_sigma10", {}};
  for (auto protocol : {RunProtocol::TactEcho, RunProtocol::OatEcho}) {
    RunConfig base = point(protocol, n);
    base.t_chi_optimal = true;
    for (double r : {0.0, 1.0}) {
      RunConfig c = base;
      c.echo_ratio = r;
      c.theta_policy = ThetaPolicy::Optimize;
      c.noise = DetectionModel::constant(1.0);
      noise.series.push_back(with_sweep(c, "sigma", kNoiseAxis));
    }
    RunConfig c = base;
    c.theta = 0.002;
    clean.series.push_back(with_sweep(c, "echo_ratio", kEchoAxis));
    c.noise = DetectionModel::constant(10.0);
    noisy.series.push_back(with_sweep(c, "echo_ratio", kEchoAxis));
  }
  return {noise, clean, noisy};
}

std::vector<FigurePanel> fig6(const FigureOptions& o) {
  std::vector<double> sizes;
  for (int n : {100, 200, 400, 800, 1600, 3200, 6400, 10000})
    if (!o.max_n || n <= *o.max_n) sizes.push_back(n);
  if (sizes.empty()) sizes.push_back(capped(100, o));
  FigurePanel panel{"fig6_fisher_vs_atom_number", {}};
  for (auto protocol : {RunProtocol::TactEcho, RunProtocol::OatEcho}) {
    for (double r : {1.0, 0.0}) {
      RunConfig c = point(protocol, static_cast<int>(sizes.front()));
      c.t_chi_optimal = true;
      c.echo_ratio = r;
      c.theta_policy = ThetaPolicy::Optimize;
      c.noise = DetectionModel::sqrt_n_scaled(0.1);
      panel.series.push_back(with_sweep(c, "n_atoms", sizes));
    }
  }
  return {panel};
}

std::vector<FigurePanel> fig7(const FigureOptions& o) {
  const int n = capped(1000, o);
  // Reference working point: 12.5 dB at N = 1000, scaled like the
  // optimal gain (log N) for smaller systems.
  const double working_db = -12.5 * std::log10(static_cast<double>(n)) / 3.0;
  auto variants = [&](RunConfig c) {
    std::vector<RunConfig> out;
    RunConfig two = c;
    two.protocol = RunProtocol::TactEcho;
    out.push_back(two);
    for (auto [variant, measurement] :
         {std::pair{SpinorVariant::FwmOnly, SpinorMeasurement::Separate},
          std::pair{SpinorVariant::Full, SpinorMeasurement::Separate},
          std::pair{SpinorVariant::Full, SpinorMeasurement::Cropped}}) {
      RunConfig s = c;
      s.protocol = RunProtocol::SpinorEcho;
      s.spinor_variant = variant;
      s.spinor_measurement = measurement;
      out.push_back(s);
    }
    return out;
  };

  FigurePanel twisting{"fig7a_fisher_vs_squeezing", {}};
  for (double r : {0.0, 1.0}) {
    RunConfig c = point(RunProtocol::TactEcho, n);
    c.theta = 0.002;
    c.echo_ratio = r;
    with_db(c, -1.0);
    with_sweep(c, "squeezing_db", range(-18.0, -1.0, 1.0));
    for (auto& s : variants(c)) twisting.series.push_back(s);
  }
  RunConfig one = point(RunProtocol::OneMode, n);
  one.theta = 0.002;
  with_db(one, -1.0);
  twisting.series.push_back(with_sweep(one, "squeezing_db", range(-18.0, -1.0, 1.0)));

  FigurePanel noise{"fig7b_fisher_vs_sigma", {}};
  for (double r : {0.0, 1.0, 2.0}) {
    RunConfig c = point(RunProtocol::TactEcho, n);
    c.theta = 0.002;
    c.echo_ratio = r;
    c.noise = DetectionModel::constant(1.0);
    with_db(c, working_db);
    with_sweep(c, "sigma", kNoiseAxis);
    for (auto& s : variants(c))
      if (s.spinor_measurement == SpinorMeasurement::Cropped) noise.series.push_back(s);
  }
  FigurePanel inset{"fig7b_inset_fisher_vs_echo_ratio", {}};
  RunConfig c = point(RunProtocol::SpinorEcho, n);
  c.theta = 0.002;
  c.noise = DetectionModel::css_level();
  with_db(c, working_db);
  inset.series.push_back(with_sweep(c, "echo_ratio", range(0.0, 3.0, 0.25)));
  return {twisting, noise, inset};
}

std::vector<int> fig8_sizes(const FigureOptions& o) {
  std::vector<int> sizes;
  for (int n : {100, 1000, 10000})
    if (!o.max_n || n <= *o.max_n) sizes.push_back(n);
  if (sizes.empty()) sizes.push_back(capped(100, o));
  return sizes;
}

std::vector<FigurePanel> fig8(const FigureOptions& o) {
  FigurePanel panel{"fig8_qfi_vs_twisting", {}};
  for (int n : fig8_sizes(o)) {
    RunConfig c = point(RunProtocol::QfiScan, n);
    const double seed = optimal_twisting_seed(n);
    std::vector<double> times;
    for (double x : linspace(0.05, 2.0, 40)) times.push_back(x * seed);
    c.t_chi = times.front();
    panel.series.push_back(with_sweep(c, "t_chi", times));
  }
  return {panel};
}

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names = {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8"};
  return names;
}

std::vector<FigurePanel> figure_panels(const std::string& recipe, const FigureOptions& options) {
  if (options.max_n && *options.max_n < 2) throw ConfigError("--max-n", "must be at least 2");
  if (recipe == "fig3") return fig3(options);
  if (recipe == "fig4") return fig4(options);
  if (recipe == "fig5") return fig5(options);
  if (recipe == "fig6") return fig6(options);
  if (recipe == "fig7") return fig7(options);
  if (recipe == "fig8") return fig8(options);
  throw ConfigError("recipe", "unknown figure '" + recipe + "'");
}

std::vector<std::string> write_figure(const std::string& recipe, const std::string& out_dir,
                                      const FigureOptions& options) {
  const auto panels = figure_panels(recipe, options);
  std::filesystem::create_directories(out_dir);
  const std::optional<std::string> stamp = options.timestamp ? std::optional(now_utc()) : std::nullopt;
  std::vector<std::string> written;
  for (const auto& panel : panels) {
    std::vector<ResultRow> rows;
    for (const auto& series : panel.series) {
      auto part = run(series, options.threads);
      if (!options.timestamp)
        for (auto& r : part) r.wall_time_ms = 0.0;
      rows.insert(rows.end(), part.begin(), part.end());
    }
    const auto path = (std::filesystem::path(out_dir) / (panel.name + ".csv")).string();
    std::ofstream out(path, std::ios::binary);
    write_csv(out, rows, stamp);
    written.push_back(path);
  }
  if (recipe == "fig8") {
    const auto path = (std::filesystem::path(out_dir) / "fig8_inset_one_mode_breakdown.csv").string();
    std::ofstream out(path, std::ios::binary);
    if (stamp) out << "# generated " << *stamp << '\n';
    out << "n_atoms,gamma,t_chi,squeezing_db,one_mode_squeezing_db,deviation\n";
    for (int n : fig8_sizes(options)) {
      const OneModeBreakdown b = find_one_mode_breakdown(n, 0.05);
      char line[256];
      std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", n, b.gamma, b.t_chi, b.xi_db,
                    b.one_mode_db, b.deviation);
      out << line;
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace twistecho
