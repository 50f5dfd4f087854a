#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vecmag/acceptance.hpp"
#include "vecmag/errors.hpp"
#include "vecmag/estimation.hpp"
#include "vecmag/pulse_engine.hpp"
#include "vecmag/schemes.hpp"
#include "vecmag/spin_core.hpp"
#include "vecmag/version.hpp"

namespace py = pybind11;
using namespace vecmag;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

SchemeConfig make_config(const std::string& scheme, const std::string& probe, int n,
                         const std::array<double, 3>& b, const std::array<double, 3>& t,
                         const std::string& evolution, double tau, const std::string& pulse_mode, double gamma) {
  SchemeConfig c;
  c.scheme = parse_scheme(scheme);
  c.probe = parse_probe(probe);
  c.dims = EnsembleDims(n);
  c.field = {b[0], b[1], b[2], gamma};
  c.durations = t;
  c.evolution = parse_evolution(evolution);
  c.tau = tau;
  c.pulse_mode = parse_pulse_mode(pulse_mode);
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Collective-spin vector magnetometry: schemes, pulses, QFI and spectral recovery";
  m.attr("__version__") = version();

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<UnsupportedBranch>(m, "UnsupportedBranch", base.ptr());
  py::register_exception<OutOfRegime>(m, "OutOfRegime", base.ptr());
  py::register_exception<UnderResolved>(m, "UnderResolved", base.ptr());
  py::register_exception<AmbiguousSign>(m, "AmbiguousSign", base.ptr());

  py::class_<SchemeConfig>(m, "SchemeConfig")
      .def(py::init(&make_config), py::arg("scheme") = "parallel", py::arg("probe") = "scs", py::arg("N") = 10,
           py::arg("B") = std::array<double, 3>{0.0, 0.0, 0.0}, py::arg("T") = std::array<double, 3>{1.0, 1.0, 1.0},
           py::arg("evolution") = "analytic", py::arg("tau") = 1e-3, py::arg("pulse_mode") = "alternating",
           py::arg("gamma") = 1.0)
      .def_property_readonly("N", [](const SchemeConfig& c) { return c.dims.particles(); })
      .def_property_readonly("B", [](const SchemeConfig& c) {
        return std::array<double, 3>{c.field.bx, c.field.by, c.field.bz};
      })
      .def_property_readonly("T", [](const SchemeConfig& c) { return c.durations; })
      .def("phases", &SchemeConfig::phases)
      .def("with_uniform_time", &SchemeConfig::with_uniform_time)
      .def("to_dict", [](const SchemeConfig& c) { return to_python(to_json(c)); })
      .def("__repr__", [](const SchemeConfig& c) { return "SchemeConfig(" + to_json(c).dump() + ")"; });

  m.def("collective_operator",
        [](int n, const std::string& axis) { return collective_operator(EnsembleDims(n), parse_axis(axis)).matrix(); },
        py::arg("N"), py::arg("axis"), "Dicke-basis matrix of J_axis, index 0 is m = J.");
  m.def("scs_state", [](int n) { return scs_state(EnsembleDims(n)).amplitudes(); }, py::arg("N"));
  m.def("ghz_state", [](int n) { return ghz_state(EnsembleDims(n)).amplitudes(); }, py::arg("N"));
  m.def("final_state",
        [](const SchemeConfig& c, const std::string& axis) { return final_state(c, parse_axis(axis)).amplitudes(); },
        py::arg("config"), py::arg("axis") = "x");
  m.def("simulated_jz",
        [](const SchemeConfig& c, const std::string& axis) {
          return expectation(final_state(c, parse_axis(axis)), collective_operator(c.dims, Axis::z));
        },
        py::arg("config"), py::arg("axis") = "x", "<Jz> of the simulated final state.");
  m.def("analytic_jz",
        [](const SchemeConfig& c, const std::string& axis) { return analytic_jz(c, parse_axis(axis)); },
        py::arg("config"), py::arg("axis") = "x", "Closed-form <Jz> (before the chain sign).");
  m.def("chain_sign",
        [](const SchemeConfig& c, const std::string& axis) { return chain_sign(c, parse_axis(axis)); },
        py::arg("config"), py::arg("axis") = "x");
  m.def("analytic_delta_b",
        [](const SchemeConfig& c, const std::string& axis) { return analytic_delta_b(c, parse_axis(axis)); },
        py::arg("config"), py::arg("axis"));
  m.def("delta_b_numeric",
        [](const SchemeConfig& c, const std::string& axis, std::optional<double> h) {
          return delta_b_numeric(c, parse_axis(axis), h);
        },
        py::arg("config"), py::arg("axis"), py::arg("h") = py::none());
  m.def("qfi_numeric",
        [](const SchemeConfig& c, const std::string& axis, std::optional<double> h) {
          return qfi_numeric(c, parse_axis(axis), h);
        },
        py::arg("config"), py::arg("axis"), py::arg("h") = py::none());
  m.def("qfi_analytic",
        [](const SchemeConfig& c, const std::string& axis) {
          const AnalyticQfi q = qfi_analytic(c, parse_axis(axis));
          return py::make_tuple(q.main, q.appendix);
        },
        py::arg("config"), py::arg("axis"), "(main-text, appendix) closed forms; equal unless they disagree.");
  m.def("precision_report", [](const SchemeConfig& c) { return to_python(to_json(precision_report(c))); },
        py::arg("config"));

  m.def("sample_signal",
        [](const SchemeConfig& c, double t_max, int samples, const std::string& source, unsigned workers) {
          const TraceSource src = source == "simulated" ? TraceSource::simulated : TraceSource::analytic;
          if (source != "simulated" && source != "analytic") throw InvalidArgument("source must be analytic or simulated");
          const SignalTrace t = sample_signal(c, t_max, samples, src, Axis::x, workers);
          return py::make_tuple(t.times(), t.values);
        },
        py::arg("config"), py::arg("t_max"), py::arg("M"), py::arg("source") = "analytic", py::arg("workers") = 1,
        "Returns (T, <Jz>) on M points of [0, t_max).");
  m.def("spectrum",
        [](const std::vector<double>& values, double dt) {
          SignalTrace t{0.0, dt, values};
          const Spectrum s = fft_spectrum(t);
          return py::make_tuple(s.omega, s.magnitude);
        },
        py::arg("values"), py::arg("dt"), "One-sided amplitude spectrum (omega, magnitude).");
  m.def("extract_peaks",
        [](const std::vector<double>& values, double dt, int count) {
          SignalTrace t{0.0, dt, values};
          PeakOptions o;
          o.count = count;
          std::vector<std::pair<double, double>> out;
          for (const auto& p : extract_peaks(fft_spectrum(t), o)) out.emplace_back(p.omega, p.amplitude);
          return out;
        },
        py::arg("values"), py::arg("dt"), py::arg("count") = 6, "[(omega, amplitude)] by descending amplitude.");
  m.def("recover_field",
        [](const SchemeConfig& c, double t_max, int samples, const std::string& source, const std::string& method,
           bool resolve) {
          const TraceSource src = source == "simulated" ? TraceSource::simulated : TraceSource::analytic;
          const SignalTrace t = sample_signal(c, t_max, samples, src);
          const Spectrum s = fft_spectrum(t);
          const double scale = c.probe == Probe::ghz ? c.dims.particles() : 1.0;
          RecoveredField f = recover_field(extract_peaks(s), scale, parse_recovery_method(method), 2.0 * s.bin_width);
          if (resolve) f = resolve_signs(f, t, c);
          return to_python(to_json(f));
        },
        py::arg("config"), py::arg("t_max") = 12.8, py::arg("M") = 4096, py::arg("source") = "simulated",
        py::arg("method") = "amplitude-rule", py::arg("resolve_signs") = true,
        "Sample, FFT, pick six peaks and recover (Bx, By, Bz).");

  m.def("fidelity_f1",
        [](int n, const std::array<double, 3>& b, double total_time, const std::vector<double>& ratios) {
          py::list out;
          for (const auto& c : fidelity_f1(EnsembleDims(n), {b[0], b[1], b[2]}, total_time, ratios)) {
            std::vector<double> t, f;
            for (const auto& s : c.samples) {
              t.push_back(s.t);
              f.push_back(s.value);
            }
            py::dict d;
            d["tau_over_axis_time"] = c.tau_over_axis_time;
            d["pairs_per_axis"] = c.pairs_per_axis;
            d["t"] = t;
            d["F1"] = f;
            d["min"] = c.min_fidelity();
            out.append(d);
          }
          return out;
        },
        py::arg("N"), py::arg("B"), py::arg("total_time"), py::arg("ratios"));
  m.def("fidelity_f2",
        [](int n, const std::array<double, 3>& b, double axis_time, double tau, double eta, int trials,
           std::uint64_t seed, const std::string& mode, const std::string& correlation, unsigned workers) {
          const auto sched = xyz_schedules(axis_time, tau, parse_pulse_mode(mode));
          const F2Result r = fidelity_f2(scs_state(EnsembleDims(n)), {b[0], b[1], b[2]}, sched,
                                         NoiseModel{eta, trials, seed, parse_error_correlation(correlation)}, workers);
          std::vector<double> t, mean, sd;
          for (const auto& s : r.samples) {
            t.push_back(s.t);
            mean.push_back(s.mean);
            sd.push_back(s.stddev);
          }
          py::dict d;
          d["t"] = t;
          d["mean"] = mean;
          d["std"] = sd;
          d["trial_mean"] = r.trial_mean;
          d["min_mean"] = r.min_mean();
          return d;
        },
        py::arg("N") = 10, py::arg("B") = std::array<double, 3>{4.0, 5.0, 6.0}, py::arg("axis_time") = 2.0,
        py::arg("tau") = 1e-3, py::arg("eta") = 0.0, py::arg("trials") = 20, py::arg("seed") = 1,
        py::arg("mode") = "alternating", py::arg("correlation") = "per-pair", py::arg("workers") = 1);

  m.def("minimize_delta_b",
        [](const std::string& probe, int n, const std::string& axis, const std::string& mode, int grid) {
          const DeltaBMinimum r = minimize_delta_b(parse_probe(probe), n, parse_axis(axis), parse_minimization(mode), grid);
          return py::make_tuple(r.delta_b, std::array<double, 3>{r.argmin.bx, r.argmin.by, r.argmin.bz});
        },
        py::arg("probe"), py::arg("N"), py::arg("axis"), py::arg("mode") = "joint", py::arg("grid_points") = 96,
        "(min dB, argmin B) of the sequential closed form at T = 1.");
  m.def("scaling_fit",
        [](const std::vector<double>& n, const std::vector<double>& db) {
          if (n.size() != db.size()) throw DimensionMismatch("N and dB must have the same length");
          std::vector<std::pair<double, double>> pts;
          for (std::size_t i = 0; i < n.size(); ++i) pts.emplace_back(n[i], db[i]);
          const ScalingFit f = scaling_fit(pts);
          return py::make_tuple(f.slope, f.intercept, f.r2);
        },
        py::arg("N"), py::arg("dB"), "(slope, intercept, r2) of ln dB against ln N.");

  m.def("validate",
        [](const std::vector<std::string>& only, std::uint64_t seed, unsigned workers) {
          acceptance::Options o;
          o.only = only;
          o.seed = seed;
          o.workers = workers;
          std::vector<acceptance::Result> results;
          {
            py::gil_scoped_release release;
            results = acceptance::run(o);
          }
          return to_python(acceptance::to_json(results, o));
        },
        py::arg("only") = std::vector<std::string>{}, py::arg("seed") = 1, py::arg("workers") = 1);
}
