#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "twistecho/figures.hpp"
#include "twistecho/runner.hpp"

namespace {

enum Exit { kOk = 0, kConfigError = 2, kAllRowsFailed = 3, kInternalFailure = 4 };

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

int run_command(const std::string& config_path, const std::string& out_path, const std::string& format,
                int threads, bool no_timestamp) {
  using namespace twistecho;
  RunConfig config = load_run_config(config_path);
  if (!format.empty()) config.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  if (!out_path.empty()) config.output_path = out_path;

  std::vector<ResultRow> rows = run(config, threads);
  if (no_timestamp)
    for (auto& r : rows) r.wall_time_ms = 0.0;
  const std::optional<std::string> stamp = no_timestamp ? std::nullopt : std::optional(now_utc());

  std::ofstream file;
  if (!config.output_path.empty()) {
    file.open(config.output_path, std::ios::binary);
    if (!file) throw ConfigError("$.output.path", "cannot write " + config.output_path);
  }
  std::ostream& out = config.output_path.empty() ? std::cout : file;
  if (config.format == OutputFormat::Json)
    write_json(out, rows, stamp);
  else
    write_csv(out, rows, stamp);

  std::size_t failed = 0;
  for (const auto& r : rows)
    if (!r.ok()) {
      ++failed;
      std::cerr << "row " << r.protocol << " N=" << r.n_atoms << ": " << r.error << '\n';
    }
  return failed == rows.size() ? kAllRowsFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twisting-echo interferometry simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, format, out_dir = ".", recipe;
  int threads = 0;
  bool no_timestamp = false;
  int max_n = 0;

  auto* run = app.add_subcommand("run", "Run a configured experiment or sweep");
  run->add_option("--config", config_path, "JSON configuration")->required();
  run->add_option("--out", out_path, "Output file (default: config output.path or stdout)");
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--threads", threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  run->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp line and zero wall_time_ms");

  auto* figure = app.add_subcommand("figure", "Reproduce the data behind a figure");
  figure->add_option("recipe", recipe, "fig3 ... fig8")->required()->check(CLI::IsMember(twistecho::figure_names()));
  figure->add_option("--max-n", max_n, "Cap on atom numbers")->check(CLI::PositiveNumber);
  figure->add_option("--out-dir", out_dir, "Output directory");
  figure->add_option("--threads", threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  figure->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp line and zero wall_time_ms");

  auto* validate = app.add_subcommand("validate", "Check a configuration without running it");
  validate->add_option("--config", config_path, "JSON configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return run_command(config_path, out_path, format, threads, no_timestamp);
    if (*validate) {
      const auto config = twistecho::load_run_config(config_path);
      std::cout << "ok: " << twistecho::expand_sweep(config).size() << " point(s)\n";
      return kOk;
    }
    if (*figure) {
      twistecho::FigureOptions options;
      if (max_n > 0) options.max_n = max_n;
      options.threads = threads;
      options.timestamp = !no_timestamp;
      for (const auto& path : twistecho::write_figure(recipe, out_dir, options)) std::cout << path << '\n';
      return kOk;
    }
  } catch (const twistecho::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "internal failure: " << e.what() << '\n';
    return kInternalFailure;
  }
  return kInternalFailure;
}
