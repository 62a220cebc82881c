#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "twistecho/metrology.hpp"
#include "twistecho/oat_opt.hpp"
#include "twistecho/spinor.hpp"

namespace twistecho {

/// Schema violation in a run configuration; `path()` names the field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Failure that is not a property of the requested point (broken
/// invariant, non-finite output).
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunProtocol { TactEcho, OatEcho, OatEchoOpt, SpinorEcho, QfiScan, OneMode };
enum class ThetaPolicy { Fixed, Optimize };
enum class OutputFormat { Csv, Json };

struct Sweep {
  std::string parameter;
  std::vector<double> values;
};

struct RunConfig {
  RunProtocol protocol = RunProtocol::TactEcho;
  int n_atoms = 100;
  /// Exactly one of these three selects the twisting strength.
  std::optional<double> squeezing_db;
  std::optional<double> t_chi;
  bool t_chi_optimal = false;
  double echo_ratio = 1.0;
  double theta = 1e-3;
  ThetaPolicy theta_policy = ThetaPolicy::Fixed;
  DetectionModel noise;
  std::optional<Sweep> sweep;

  SpinorVariant spinor_variant = SpinorVariant::Full;
  SpinorMeasurement spinor_measurement = SpinorMeasurement::Cropped;
  double spinor_lambda = 1.0;

  bool oat_align = true;
  bool oat_readout = false;
  ReadoutObjective oat_objective = ReadoutObjective::Snr;

  std::string output_path;
  OutputFormat format = OutputFormat::Csv;

  /// Throws ConfigError.
  void validate() const;
};

/// Parameters a sweep may vary.
const std::vector<std::string>& sweepable_parameters();

RunConfig parse_run_config(const nlohmann::json& doc);
/// Reads and parses a JSON file; unreadable or malformed files raise
/// ConfigError with path "$".
RunConfig load_run_config(const std::string& path);

/// One config per sweep point, sorted by sweep value, without a sweep.
std::vector<RunConfig> expand_sweep(const RunConfig& config);

struct ResultRow {
  std::string protocol;
  int n_atoms = 0;
  double t_chi = 0.0;
  double gamma = 0.0;
  /// Requested squeezing, NaN when t_chi was given.
  double target_squeezing_db = 0.0;
  double echo_ratio = 0.0;
  double theta = 0.0;
  std::string theta_policy;
  std::string noise;
  double sigma = 0.0;
  std::string variant;
  std::string measurement;
  double alignment_angle = 0.0;
  double readout_angle = 0.0;

  double fisher_information = 0.0;
  double noisy_fisher_information = 0.0;
  double gain_db = 0.0;
  double qfi = 0.0;
  double magnification = 0.0;
  double snr = 0.0;
  double squeezing_db = 0.0;
  double css_fidelity = 0.0;
  double wall_time_ms = 0.0;

  std::string status = "ok";
  std::string error;

  bool ok() const noexcept { return status == "ok"; }
};

/// Evaluates a single (sweep-free) point. Domain failures become an error
/// row; anything else propagates.
ResultRow run_point(const RunConfig& point);

/// All sweep points on `threads` workers (0: hardware concurrency). Output
/// order is the sweep order regardless of scheduling.
std::vector<ResultRow> run(const RunConfig& config, int threads = 0);

const std::vector<std::string>& result_columns();
/// Fields in result_columns() order; NaN becomes null.
nlohmann::ordered_json to_json(const ResultRow& row);
nlohmann::ordered_json to_json(const std::vector<ResultRow>& rows);
/// Checks a serialized row against the ResultRow schema; throws ConfigError.
void validate_row(const nlohmann::ordered_json& row);

/// Header plus one line per row, 17 significant digits, LF endings, and an
/// optional "# generated <timestamp>" first line. NaN is written empty.
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows,
               const std::optional<std::string>& timestamp = std::nullopt);
void write_json(std::ostream& out, const std::vector<ResultRow>& rows,
                const std::optional<std::string>& timestamp = std::nullopt);

const char* to_string(RunProtocol protocol) noexcept;

}  // namespace twistecho
