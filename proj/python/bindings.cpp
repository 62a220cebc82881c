#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twistecho/echo.hpp"
#include "twistecho/errors.hpp"
#include "twistecho/oat_opt.hpp"
#include "twistecho/one_mode.hpp"
#include "twistecho/runner.hpp"
#include "twistecho/spinor.hpp"

namespace py = pybind11;
using namespace twistecho;

namespace {

DetectionModel noise_model(double sigma) { return sigma > 0 ? DetectionModel::constant(sigma) : DetectionModel::none(); }

DickeState as_state(const Eigen::VectorXcd& amplitudes) {
  return DickeState(SpinSystem(static_cast<int>(amplitudes.size()) - 1), amplitudes);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Twisting-echo interferometry: Dicke-basis simulation, echo protocols and metrology";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<UndefinedSignalError>(m, "UndefinedSignalError", PyExc_ArithmeticError);
  py::register_exception<DegenerateStateError>(m, "DegenerateStateError", PyExc_ArithmeticError);
  py::register_exception<OutOfWindowError>(m, "OutOfWindowError", PyExc_ArithmeticError);
  py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<Protocol>(m, "Protocol").value("TACT", Protocol::TactEcho).value("OAT", Protocol::OatEcho);
  py::enum_<Twisting>(m, "Twisting").value("TACT", Twisting::TACT).value("OAT", Twisting::OAT);
  py::enum_<SpinorVariant>(m, "SpinorVariant")
      .value("FULL", SpinorVariant::Full)
      .value("FWM_ONLY", SpinorVariant::FwmOnly);
  py::enum_<SpinorMeasurement>(m, "SpinorMeasurement")
      .value("CROPPED", SpinorMeasurement::Cropped)
      .value("SEPARATE", SpinorMeasurement::Separate);

  py::class_<EchoSpec>(m, "EchoSpec")
      .def(py::init([](Protocol protocol, int n_atoms, double t_chi, double echo_ratio, double theta) {
             EchoSpec s;
             s.protocol = protocol;
             s.n_atoms = n_atoms;
             s.t_chi = t_chi;
             s.echo_ratio = echo_ratio;
             s.theta = theta;
             s.validate();
             return s;
           }),
           py::arg("protocol"), py::arg("n_atoms"), py::arg("t_chi"), py::arg("echo_ratio") = 1.0,
           py::arg("theta") = 1e-3)
      .def_readwrite("protocol", &EchoSpec::protocol)
      .def_readwrite("n_atoms", &EchoSpec::n_atoms)
      .def_readwrite("t_chi", &EchoSpec::t_chi)
      .def_readwrite("echo_ratio", &EchoSpec::echo_ratio)
      .def_readwrite("theta", &EchoSpec::theta);

  m.def("calibrate_twisting",
        [](int n, Twisting kind, double target_db) { return calibrate_twisting(SpinSystem(n), kind, target_db); },
        py::arg("n_atoms"), py::arg("kind"), py::arg("target_db"));
  m.def("optimal_twisting",
        [](int n) {
          const OptimalTwisting o = optimal_twisting(SpinSystem(n));
          return py::dict(py::arg("t_chi") = o.t_chi, py::arg("seed") = o.seed, py::arg("f_q") = o.f_q);
        },
        py::arg("n_atoms"));

  m.def("echo_stages",
        [](const EchoSpec& spec) {
          std::vector<Eigen::VectorXcd> out;
          for (const auto& s : run_echo(spec)) out.push_back(s.state.amplitudes());
          return out;
        },
        "Amplitudes after preparation, imprint, echo and readout.", py::arg("spec"));
  m.def("outcome_distribution",
        [](const EchoSpec& spec) {
          const OutcomeDistribution d = EchoSequence(spec).distribution(spec.theta);
          return py::make_tuple(d.eigenvalues, d.probabilities, d.derivative);
        },
        "(J_z eigenvalues, P, dP/dtheta) of the final measurement.", py::arg("spec"));
  m.def("fisher_information",
        [](const EchoSpec& spec, double sigma) { return EchoSequence(spec).fisher(spec.theta, noise_model(sigma)); },
        py::arg("spec"), py::arg("sigma") = 0.0);
  m.def("optimize_phase",
        [](const EchoSpec& spec, double sigma) {
          const PhaseOptimum o = optimize_phase(spec, noise_model(sigma));
          return py::make_tuple(o.theta, o.fisher);
        },
        "(theta, fisher) maximizing the noisy Fisher information.", py::arg("spec"), py::arg("sigma") = 0.0);
  m.def("magnification_factor", &magnification_factor, py::arg("spec"));
  m.def("signal_to_noise", &signal_to_noise, py::arg("spec"));

  m.def("quantum_fisher_information",
        [](const Eigen::VectorXcd& amplitudes) { return quantum_fisher_information(as_state(amplitudes)).optimal; },
        py::arg("amplitudes"));
  m.def("squeezing_db", [](const Eigen::VectorXcd& a) { return squeezing_parameter(as_state(a)).db; },
        py::arg("amplitudes"));
  m.def("css_fidelity", [](const Eigen::VectorXcd& a) { return css_fidelity(as_state(a)).fidelity; },
        py::arg("amplitudes"));
  m.def("husimi",
        [](const Eigen::VectorXcd& a, int n_polar, int n_azimuth) { return husimi(as_state(a), n_polar, n_azimuth); },
        py::arg("amplitudes"), py::arg("n_polar") = 91, py::arg("n_azimuth") = 180);

  m.def("one_mode",
        [](int n, double gamma, double phi, double echo_ratio, double sigma) {
          const OneModeParams p{n, gamma, phi, echo_ratio, sigma};
          return py::dict(py::arg("phase_variance") = ideal_phase_variance(p),
                          py::arg("noisy_phase_variance") = noisy_phase_variance(p),
                          py::arg("magnification") = one_mode_magnification(p),
                          py::arg("snr") = one_mode_snr(p));
        },
        py::arg("n_atoms"), py::arg("gamma"), py::arg("phi"), py::arg("echo_ratio") = 1.0, py::arg("sigma") = 0.0);

  m.def("spinor_fisher",
        [](int n, double t_chi_equivalent, double echo_ratio, double theta, SpinorVariant variant,
           SpinorMeasurement measurement, double sigma) {
          SpinorParams p;
          p.q = variant == SpinorVariant::Full ? SpinorParams::compensating_q(n, p.lambda) : 0.0;
          p.t_chi_equivalent = t_chi_equivalent;
          p.echo_ratio = echo_ratio;
          p.theta = theta;
          return SpinorEcho(n, p, variant).fisher(theta, measurement, noise_model(sigma));
        },
        py::arg("n_atoms"), py::arg("t_chi_equivalent"), py::arg("echo_ratio") = 1.0, py::arg("theta") = 1e-3,
        py::arg("variant") = SpinorVariant::Full, py::arg("measurement") = SpinorMeasurement::Cropped,
        py::arg("sigma") = 0.0);

  m.def("optimal_alignment_angle",
        [](int n, double t_chi) {
          const AlignmentResult a = optimal_alignment_angle(SpinSystem(n), t_chi);
          return py::make_tuple(a.angle, a.degenerate);
        },
        py::arg("n_atoms"), py::arg("t_chi"));

  m.def("run_config_json",
        [](const std::string& text, int threads) {
          const RunConfig c = parse_run_config(nlohmann::json::parse(text));
          std::vector<ResultRow> rows;
          {
            py::gil_scoped_release release;
            rows = run(c, threads);
          }
          return to_json(rows).dump();
        },
        "Runs a JSON run configuration and returns the rows as a JSON array.", py::arg("config"),
        py::arg("threads") = 0);
}
