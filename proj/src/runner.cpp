#include "twistecho/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "twistecho/errors.hpp"
#include "twistecho/one_mode.hpp"
#include "twistecho/optimize.hpp"

namespace twistecho {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename Enum>
Enum parse_enum(const json& value, const std::string& path,
                const std::vector<std::pair<const char*, Enum>>& names) {
  if (!value.is_string()) throw ConfigError(path, "expected a string");
  const auto text = value.get<std::string>();
  for (const auto& [name, e] : names)
    if (text == name) return e;
  std::string allowed;
  for (const auto& [name, e] : names) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  throw ConfigError(path, "unknown value '" + text + "' (allowed: " + allowed + ")");
}

double number(const json& value, const std::string& path) {
  if (!value.is_number()) throw ConfigError(path, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

bool boolean(const json& value, const std::string& path) {
  if (!value.is_boolean()) throw ConfigError(path, "expected true or false");
  return value.get<bool>();
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; });
    if (!known) throw ConfigError(path + "." + item.key(), "unknown field");
  }
}

int as_atom_count(double value, const std::string& path) {
  if (value != std::floor(value) || value < 1 || value > 1e7) throw ConfigError(path, "must be a positive integer");
  return static_cast<int>(value);
}

const std::vector<std::pair<const char*, RunProtocol>> kProtocols = {
    {"tact_echo", RunProtocol::TactEcho},     {"oat_echo", RunProtocol::OatEcho},
    {"oat_echo_opt", RunProtocol::OatEchoOpt}, {"spinor_echo", RunProtocol::SpinorEcho},
    {"qfi_scan", RunProtocol::QfiScan},        {"one_mode", RunProtocol::OneMode}};

const char* noise_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::Constant: return "constant";
    case NoiseKind::SqrtNScaled: return "sqrtN_scaled";
  }
  return "?";
}

DetectionModel parse_noise(const json& obj) {
  only_keys(obj, "$.noise", {"kind", "sigma", "coefficient"});
  if (!obj.contains("kind")) throw ConfigError("$.noise.kind", "required");
  DetectionModel m;
  m.kind = parse_enum<NoiseKind>(obj["kind"], "$.noise.kind",
                                 {{"none", NoiseKind::None},
                                  {"constant", NoiseKind::Constant},
                                  {"sqrtN_scaled", NoiseKind::SqrtNScaled}});
  const char* key = m.kind == NoiseKind::Constant ? "sigma" : "coefficient";
  for (const char* other : {"sigma", "coefficient"})
    if (obj.contains(other) && (m.kind == NoiseKind::None || std::string(other) != key))
      throw ConfigError(std::string("$.noise.") + other, std::string("not used with kind ") + noise_name(m.kind));
  if (m.kind != NoiseKind::None) {
    if (!obj.contains(key)) throw ConfigError(std::string("$.noise.") + key, "required");
    m.value = number(obj[key], std::string("$.noise.") + key);
  }
  return m;
}

Sweep parse_sweep(const json& obj) {
  only_keys(obj, "$.sweep", {"parameter", "values", "range"});
  Sweep s;
  if (!obj.contains("parameter") || !obj["parameter"].is_string())
    throw ConfigError("$.sweep.parameter", "required string");
  s.parameter = obj["parameter"].get<std::string>();
  const auto& names = sweepable_parameters();
  if (std::find(names.begin(), names.end(), s.parameter) == names.end())
    throw ConfigError("$.sweep.parameter", "'" + s.parameter + "' is not a sweepable field");
  if (obj.contains("values") == obj.contains("range"))
    throw ConfigError("$.sweep", "exactly one of 'values' or 'range' is required");
  if (obj.contains("values")) {
    const auto& v = obj["values"];
    if (!v.is_array()) throw ConfigError("$.sweep.values", "expected an array");
    for (std::size_t i = 0; i < v.size(); ++i)
      s.values.push_back(number(v[i], "$.sweep.values[" + std::to_string(i) + "]"));
  } else {
    const auto& r = obj["range"];
    only_keys(r, "$.sweep.range", {"start", "stop", "step"});
    for (const char* k : {"start", "stop", "step"})
      if (!r.contains(k)) throw ConfigError(std::string("$.sweep.range.") + k, "required");
    const double start = number(r["start"], "$.sweep.range.start");
    const double stop = number(r["stop"], "$.sweep.range.stop");
    const double step = number(r["step"], "$.sweep.range.step");
    if (step <= 0) throw ConfigError("$.sweep.range.step", "must be positive");
    if (stop < start) throw ConfigError("$.sweep.range.stop", "must not be below start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 100000) throw ConfigError("$.sweep.range", "more than 100000 points");
    for (long i = 0; i < count; ++i) s.values.push_back(start + static_cast<double>(i) * step);
  }
  if (s.values.empty()) throw ConfigError("$.sweep.values", "sweep is empty");
  return s;
}

void apply_sweep_value(RunConfig& c, const std::string& parameter, double v) {
  if (parameter == "n_atoms") {
    c.n_atoms = as_atom_count(v, "$.sweep.values");
  } else if (parameter == "squeezing_db") {
    c.squeezing_db = v;
    c.t_chi.reset();
    c.t_chi_optimal = false;
  } else if (parameter == "t_chi") {
    c.t_chi = v;
    c.squeezing_db.reset();
    c.t_chi_optimal = false;
  } else if (parameter == "echo_ratio") {
    c.echo_ratio = v;
  } else if (parameter == "theta") {
    c.theta = v;
  } else if (parameter == "sigma") {
    if (c.noise.kind == NoiseKind::None) c.noise.kind = NoiseKind::Constant;
    c.noise.value = v;
  } else if (parameter == "lambda") {
    c.spinor_lambda = v;
  }
}

bool is_tact_like(RunProtocol p) { return p != RunProtocol::OatEcho && p != RunProtocol::OatEchoOpt; }

// -- twisting strength ------------------------------------------------------

double resolve_t_chi(const RunConfig& c) {
  if (c.t_chi) return *c.t_chi;
  const SpinSystem system(c.n_atoms);
  if (c.t_chi_optimal) {
    if (is_tact_like(c.protocol)) return optimal_twisting(system).t_chi;
    // OAT reaches its QFI plateau from t_chi ~ 1/sqrt(N) on.
    return 1.0 / std::sqrt(static_cast<double>(c.n_atoms));
  }
  if (c.protocol == RunProtocol::OneMode) return -*c.squeezing_db * std::log(10.0) / 20.0 / c.n_atoms;
  return calibrate_twisting(system, is_tact_like(c.protocol) ? Twisting::TACT : Twisting::OAT, *c.squeezing_db);
}

// -- theta optimization shared by the spinor path ----------------------------

template <typename F>
double best_theta(F&& fisher_at) {
  const Maximum best = grid_then_refine([&](double lt) { return fisher_at(std::exp(lt)); },
                                        linspace(std::log(1e-4), std::log(0.1), 21), 1e-3);
  return std::exp(best.x);
}

template <typename F>
double or_nan(F&& f) {
  try {
    return f();
  } catch (const std::domain_error&) {
    return kNaN;
  }
}

void fill_gain(ResultRow& row) {
  row.gain_db = 10.0 * std::log10(row.noisy_fisher_information / row.n_atoms);
}

void evaluate_echo(const RunConfig& c, ResultRow& row) {
  EchoSpec spec;
  spec.protocol = c.protocol == RunProtocol::TactEcho ? Protocol::TactEcho : Protocol::OatEcho;
  spec.n_atoms = c.n_atoms;
  spec.t_chi = row.t_chi;
  spec.echo_ratio = c.echo_ratio;
  spec.theta = c.theta;
  if (c.protocol == RunProtocol::OatEchoOpt) {
    OatOptimizationSpec opt{spec, c.oat_align, c.oat_readout, c.oat_objective};
    spec = resolve(opt);
    if (spec.pre_imprint_rotation) row.alignment_angle = spec.pre_imprint_rotation->angle;
    if (spec.pre_readout_rotation) row.readout_angle = spec.pre_readout_rotation->angle;
  }
  const EchoSequence seq(spec);
  if (c.theta_policy == ThetaPolicy::Optimize) spec.theta = optimize_phase(seq, c.noise).theta;
  row.theta = spec.theta;

  row.fisher_information = seq.fisher(spec.theta, DetectionModel::none());
  row.noisy_fisher_information =
      c.noise.kind == NoiseKind::None ? row.fisher_information : seq.fisher(spec.theta, c.noise);
  fill_gain(row);

  const DickeState prepared(seq.system(), seq.prepared());
  row.qfi = quantum_fisher_information(prepared).optimal;
  row.squeezing_db = or_nan([&] {
    return (spec.protocol == Protocol::TactEcho ? squeezing_parameter(prepared)
                                                : squeezing_parameter_min_quadrature(prepared))
        .db;
  });
  row.magnification = or_nan([&] { return magnification_factor(spec); });
  row.snr = or_nan([&] { return signal_to_noise(spec); });
  row.css_fidelity = css_fidelity(DickeState(seq.system(), seq.echo(seq.imprint(spec.theta)))).fidelity;
}

void evaluate_spinor(const RunConfig& c, ResultRow& row) {
  SpinorParams p;
  p.lambda = c.spinor_lambda;
  p.q = c.spinor_variant == SpinorVariant::Full ? SpinorParams::compensating_q(c.n_atoms, p.lambda) : 0.0;
  p.t_chi_equivalent = row.t_chi;
  p.echo_ratio = c.echo_ratio;
  p.theta = c.theta;
  const SpinorEcho echo(c.n_atoms, p, c.spinor_variant);
  double theta = c.theta;
  if (c.theta_policy == ThetaPolicy::Optimize)
    theta = best_theta([&](double t) { return echo.fisher(t, c.spinor_measurement, c.noise); });
  row.theta = theta;
  row.fisher_information = echo.fisher(theta, c.spinor_measurement, DetectionModel::none());
  row.noisy_fisher_information = c.noise.kind == NoiseKind::None
                                     ? row.fisher_information
                                     : echo.fisher(theta, c.spinor_measurement, c.noise);
  fill_gain(row);
}

void evaluate_qfi(const RunConfig& c, ResultRow& row) {
  const auto ws = SpinWorkspace::shared(c.n_atoms);
  const DickeState prepared = ws->twist(DickeState::pole(ws->system()), Twisting::TACT, row.t_chi);
  row.qfi = quantum_fisher_information(prepared).optimal;
  row.squeezing_db = or_nan([&] { return squeezing_parameter(prepared).db; });
}

void evaluate_one_mode(const RunConfig& c, ResultRow& row) {
  const OneModeParams p = OneModeParams::from_two_mode(c.n_atoms, row.t_chi, c.theta, c.echo_ratio, row.sigma);
  row.fisher_information = 1.0 / ideal_phase_variance(p);
  row.noisy_fisher_information = 1.0 / noisy_phase_variance(p);
  fill_gain(row);
  row.magnification = one_mode_magnification(p);
  row.snr = one_mode_snr(p);
  row.squeezing_db = 10.0 * std::log10(std::exp(-2.0 * p.gamma));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names = {"n_atoms", "squeezing_db", "t_chi", "echo_ratio",
                                                 "theta",   "sigma",        "lambda"};
  return names;
}

void RunConfig::validate() const {
  if (n_atoms < 1) throw ConfigError("$.n_atoms", "must be a positive integer");
  const int selectors = int(squeezing_db.has_value()) + int(t_chi.has_value()) + int(t_chi_optimal);
  if (selectors != 1) throw ConfigError("$", "exactly one of squeezing_db or t_chi is required");
  if (squeezing_db && *squeezing_db > 0) throw ConfigError("$.squeezing_db", "must be <= 0 dB");
  if (t_chi && *t_chi < 0) throw ConfigError("$.t_chi", "must be non-negative");
  if (echo_ratio < 0) throw ConfigError("$.echo_ratio", "must be non-negative");
  if (noise.kind != NoiseKind::None && noise.value < 0) throw ConfigError("$.noise", "noise width must be >= 0");
  if (spinor_lambda <= 0) throw ConfigError("$.spinor.lambda", "must be positive");
  if (protocol == RunProtocol::OatEchoOpt && !oat_align && !oat_readout)
    throw ConfigError("$.oat_opt", "at least one of align or readout must be true");
  if (protocol == RunProtocol::OatEchoOpt && oat_readout && theta == 0 && theta_policy == ThetaPolicy::Fixed)
    throw ConfigError("$.theta", "readout optimization needs a nonzero phase");
  if (sweep && sweep->values.empty()) throw ConfigError("$.sweep.values", "sweep is empty");
}

RunConfig parse_run_config(const json& doc) {
  only_keys(doc, "$",
            {"protocol", "n_atoms", "squeezing_db", "t_chi", "echo_ratio", "theta", "theta_policy", "noise",
             "sweep", "spinor", "oat_opt", "output"});
  RunConfig c;
  if (!doc.contains("protocol")) throw ConfigError("$.protocol", "required");
  c.protocol = parse_enum(doc["protocol"], "$.protocol", kProtocols);
  if (!doc.contains("n_atoms")) throw ConfigError("$.n_atoms", "required");
  c.n_atoms = as_atom_count(number(doc["n_atoms"], "$.n_atoms"), "$.n_atoms");

  if (doc.contains("squeezing_db") && doc.contains("t_chi"))
    throw ConfigError("$", "squeezing_db and t_chi are mutually exclusive");
  if (doc.contains("squeezing_db")) c.squeezing_db = number(doc["squeezing_db"], "$.squeezing_db");
  if (doc.contains("t_chi")) {
    const auto& t = doc["t_chi"];
    if (t.is_string()) {
      if (t.get<std::string>() != "optimal") throw ConfigError("$.t_chi", "expected a number or \"optimal\"");
      c.t_chi_optimal = true;
    } else {
      c.t_chi = number(t, "$.t_chi");
    }
  }
  if (doc.contains("echo_ratio")) c.echo_ratio = number(doc["echo_ratio"], "$.echo_ratio");
  if (doc.contains("theta_policy"))
    c.theta_policy = parse_enum<ThetaPolicy>(doc["theta_policy"], "$.theta_policy",
                                             {{"fixed", ThetaPolicy::Fixed}, {"optimize", ThetaPolicy::Optimize}});
  if (doc.contains("theta")) {
    c.theta = number(doc["theta"], "$.theta");
  } else if (c.theta_policy == ThetaPolicy::Fixed && c.protocol != RunProtocol::QfiScan) {
    throw ConfigError("$.theta", "required unless theta_policy is \"optimize\"");
  }
  if (doc.contains("noise")) c.noise = parse_noise(doc["noise"]);
  if (doc.contains("sweep")) c.sweep = parse_sweep(doc["sweep"]);

  if (doc.contains("spinor")) {
    const auto& s = doc["spinor"];
    only_keys(s, "$.spinor", {"variant", "measurement", "lambda"});
    if (s.contains("variant"))
      c.spinor_variant = parse_enum<SpinorVariant>(s["variant"], "$.spinor.variant",
                                                   {{"full", SpinorVariant::Full}, {"fwm_only", SpinorVariant::FwmOnly}});
    if (s.contains("measurement"))
      c.spinor_measurement = parse_enum<SpinorMeasurement>(
          s["measurement"], "$.spinor.measurement",
          {{"cropped", SpinorMeasurement::Cropped}, {"separate", SpinorMeasurement::Separate}});
    if (s.contains("lambda")) c.spinor_lambda = number(s["lambda"], "$.spinor.lambda");
  }
  if (doc.contains("oat_opt")) {
    const auto& o = doc["oat_opt"];
    only_keys(o, "$.oat_opt", {"align", "readout", "objective"});
    if (o.contains("align")) c.oat_align = boolean(o["align"], "$.oat_opt.align");
    if (o.contains("readout")) c.oat_readout = boolean(o["readout"], "$.oat_opt.readout");
    if (o.contains("objective"))
      c.oat_objective = parse_enum<ReadoutObjective>(
          o["objective"], "$.oat_opt.objective",
          {{"snr", ReadoutObjective::Snr}, {"magnification", ReadoutObjective::Magnification}});
  }
  if (doc.contains("output")) {
    const auto& o = doc["output"];
    only_keys(o, "$.output", {"path", "format"});
    if (o.contains("path")) {
      if (!o["path"].is_string()) throw ConfigError("$.output.path", "expected a string");
      c.output_path = o["path"].get<std::string>();
    }
    if (o.contains("format"))
      c.format = parse_enum<OutputFormat>(o["format"], "$.output.format",
                                          {{"csv", OutputFormat::Csv}, {"json", OutputFormat::Json}});
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot read " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
  return parse_run_config(doc);
}

std::vector<RunConfig> expand_sweep(const RunConfig& config) {
  RunConfig base = config;
  base.sweep.reset();
  if (!config.sweep) return {base};
  std::vector<double> values = config.sweep->values;
  std::stable_sort(values.begin(), values.end());
  std::vector<RunConfig> points;
  points.reserve(values.size());
  for (double v : values) {
    RunConfig p = base;
    apply_sweep_value(p, config.sweep->parameter, v);
    p.validate();
    points.push_back(std::move(p));
  }
  return points;
}

ResultRow run_point(const RunConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  ResultRow row;
  row.protocol = to_string(c.protocol);
  row.n_atoms = c.n_atoms;
  row.target_squeezing_db = c.squeezing_db.value_or(kNaN);
  row.echo_ratio = c.echo_ratio;
  row.theta = c.theta;
  row.theta_policy = c.theta_policy == ThetaPolicy::Fixed ? "fixed" : "optimize";
  row.noise = noise_name(c.noise.kind);
  row.sigma = c.noise.kind == NoiseKind::None ? 0.0 : c.noise.sigma(c.n_atoms);
  row.variant = c.protocol == RunProtocol::SpinorEcho ? to_string(c.spinor_variant) : "";
  row.measurement = c.protocol == RunProtocol::SpinorEcho ? to_string(c.spinor_measurement) : "";
  row.t_chi = row.gamma = kNaN;
  row.alignment_angle = row.readout_angle = kNaN;
  row.fisher_information = row.noisy_fisher_information = row.gain_db = kNaN;
  row.qfi = row.magnification = row.snr = row.squeezing_db = row.css_fidelity = kNaN;

  try {
    row.t_chi = resolve_t_chi(c);
    row.gamma = row.t_chi * c.n_atoms;
    switch (c.protocol) {
      case RunProtocol::TactEcho:
      case RunProtocol::OatEcho:
      case RunProtocol::OatEchoOpt: evaluate_echo(c, row); break;
      case RunProtocol::SpinorEcho: evaluate_spinor(c, row); break;
      case RunProtocol::QfiScan: evaluate_qfi(c, row); break;
      case RunProtocol::OneMode: evaluate_one_mode(c, row); break;
    }
  } catch (const CalibrationError& e) {
    row.status = "error";
    row.error = e.what();
  } catch (const ContractViolation& e) {
    row.status = "error";
    row.error = e.what();
  } catch (const std::domain_error& e) {
    row.status = "error";
    row.error = e.what();
  }
  if (row.ok()) {
    for (double v : {row.fisher_information, row.noisy_fisher_information, row.qfi})
      if (std::isinf(v)) throw InternalError(std::string("non-finite result for ") + row.protocol);
  }
  row.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<ResultRow> run(const RunConfig& config, int threads) {
  config.validate();
  const std::vector<RunConfig> points = expand_sweep(config);
  std::vector<ResultRow> rows(points.size());
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min<int>(threads, static_cast<int>(points.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        rows[i] = run_point(points[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = points.size();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> columns = {
      "protocol",      "n_atoms",         "t_chi",           "gamma",
      "target_squeezing_db", "echo_ratio", "theta",          "theta_policy",
      "noise",         "sigma",           "variant",         "measurement",
      "alignment_angle", "readout_angle", "fisher_information", "noisy_fisher_information",
      "gain_db",       "qfi",             "magnification",   "snr",
      "squeezing_db",  "css_fidelity",    "wall_time_ms",    "status",
      "error"};
  return columns;
}

nlohmann::ordered_json to_json(const ResultRow& r) {
  return nlohmann::ordered_json{{"protocol", r.protocol},
              {"n_atoms", r.n_atoms},
              {"t_chi", number_or_null(r.t_chi)},
              {"gamma", number_or_null(r.gamma)},
              {"target_squeezing_db", number_or_null(r.target_squeezing_db)},
              {"echo_ratio", r.echo_ratio},
              {"theta", r.theta},
              {"theta_policy", r.theta_policy},
              {"noise", r.noise},
              {"sigma", r.sigma},
              {"variant", r.variant},
              {"measurement", r.measurement},
              {"alignment_angle", number_or_null(r.alignment_angle)},
              {"readout_angle", number_or_null(r.readout_angle)},
              {"fisher_information", number_or_null(r.fisher_information)},
              {"noisy_fisher_information", number_or_null(r.noisy_fisher_information)},
              {"gain_db", number_or_null(r.gain_db)},
              {"qfi", number_or_null(r.qfi)},
              {"magnification", number_or_null(r.magnification)},
              {"snr", number_or_null(r.snr)},
              {"squeezing_db", number_or_null(r.squeezing_db)},
              {"css_fidelity", number_or_null(r.css_fidelity)},
              {"wall_time_ms", r.wall_time_ms},
              {"status", r.status},
              {"error", r.error}};
}

nlohmann::ordered_json to_json(const std::vector<ResultRow>& rows) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& r : rows) out.push_back(to_json(r));
  return out;
}

void validate_row(const nlohmann::ordered_json& row) {
  if (!row.is_object()) throw ConfigError("$", "row must be an object");
  static const std::map<std::string, char> kinds = {
      {"protocol", 's'}, {"theta_policy", 's'}, {"noise", 's'}, {"variant", 's'},
      {"measurement", 's'}, {"status", 's'}, {"error", 's'}, {"n_atoms", 'i'}};
  const auto& columns = result_columns();
  if (row.size() != columns.size()) throw ConfigError("$", "unexpected field count");
  for (const auto& col : columns) {
    if (!row.contains(col)) throw ConfigError("$." + col, "missing");
    const auto& v = row[col];
    const auto it = kinds.find(col);
    const char kind = it == kinds.end() ? 'n' : it->second;
    if (kind == 's' && !v.is_string()) throw ConfigError("$." + col, "expected a string");
    if (kind == 'i' && !v.is_number_integer()) throw ConfigError("$." + col, "expected an integer");
    if (kind == 'n' && !v.is_number() && !v.is_null()) throw ConfigError("$." + col, "expected a number or null");
  }
  const auto status = row["status"].get<std::string>();
  if (status != "ok" && status != "error") throw ConfigError("$.status", "must be ok or error");
  if (status == "ok" && row["noisy_fisher_information"].is_number() && row["gain_db"].is_number()) {
    const double expected =
        10.0 * std::log10(row["noisy_fisher_information"].get<double>() / row["n_atoms"].get<double>());
    if (std::abs(expected - row["gain_db"].get<double>()) > 1e-9)
      throw ConfigError("$.gain_db", "inconsistent with noisy_fisher_information");
  }
  if (status == "error" && row["error"].get<std::string>().empty())
    throw ConfigError("$.error", "error rows need a message");
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, const std::optional<std::string>& timestamp) {
  if (timestamp) out << "# generated " << *timestamp << '\n';
  const auto& columns = result_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  auto text = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  for (const auto& r : rows) {
    const std::vector<std::string> cells = {
        text(r.protocol),
        std::to_string(r.n_atoms),
        format_double(r.t_chi),
        format_double(r.gamma),
        format_double(r.target_squeezing_db),
        format_double(r.echo_ratio),
        format_double(r.theta),
        text(r.theta_policy),
        text(r.noise),
        format_double(r.sigma),
        text(r.variant),
        text(r.measurement),
        format_double(r.alignment_angle),
        format_double(r.readout_angle),
        format_double(r.fisher_information),
        format_double(r.noisy_fisher_information),
        format_double(r.gain_db),
        format_double(r.qfi),
        format_double(r.magnification),
        format_double(r.snr),
        format_double(r.squeezing_db),
        format_double(r.css_fidelity),
        format_double(r.wall_time_ms),
        text(r.status),
        text(r.error)};
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  }
}

void write_json(std::ostream& out, const std::vector<ResultRow>& rows, const std::optional<std::string>& timestamp) {
  nlohmann::ordered_json doc;
  if (timestamp) doc["generated"] = *timestamp;
  doc["rows"] = to_json(rows);
  out << doc.dump(2) << '\n';
}

const char* to_string(RunProtocol protocol) noexcept {
  for (const auto& [name, p] : kProtocols)
    if (p == protocol) return name;
  return "?";
}

}  // namespace twistecho
