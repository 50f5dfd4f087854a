#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "vecmag/acceptance.hpp"
#include "vecmag/errors.hpp"
#include "vecmag/estimation.hpp"
#include "vecmag/parallel.hpp"
#include "vecmag/pulse_engine.hpp"
#include "vecmag/schemes.hpp"
#include "vecmag/table_io.hpp"
#include "vecmag/version.hpp"

namespace vecmag::cli {

namespace {

using nlohmann::json;

/// Thrown for flag values that parse but make no sense together.
class FlagError : public InvalidArgument {
 public:
  FlagError(const std::string& flag, const std::string& message)
      : InvalidArgument(flag + ": " + message) {}
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(text);
  while (std::getline(is, cell, sep)) out.push_back(trim(cell));
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double parse_plain(const std::string& text) {
  if (text.empty()) throw InvalidArgument("empty number");
  return parse_number(text);
}

int parse_int(const std::string& text) {
  const double v = parse_plain(text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw InvalidArgument("not an integer: '" + text + "'");
  return static_cast<int>(v);
}

// Options shared by the scheme-driven subcommands.
struct SchemeFlags {
  std::string scheme = "parallel";
  std::string probe = "scs";
  int n = 10;
  std::string b;
  double gamma = 1.0;
  std::string durations;
  std::string evolution = "analytic";
  double tau = 1e-3;
  std::string pulse_mode = "alternating";

  void add(CLI::App* app, const std::string& default_b, const std::string& default_scheme) {
    b = default_b;
    scheme = default_scheme;
    app->add_option("--scheme", scheme, "parallel | sequential")->capture_default_str();
    app->add_option("--probe", probe, "scs | ghz")->capture_default_str();
    app->add_option("--N", n, "number of particles")->capture_default_str();
    app->add_option("--B", b, "field bx,by,bz")->capture_default_str();
    app->add_option("--gamma", gamma, "gyromagnetic ratio")->capture_default_str();
    app->add_option("--T", durations, "interrogation time T, or Tx,Ty,Tz");
    app->add_option("--tau", tau, "pulse spacing for exact evolution")->capture_default_str();
    app->add_option("--pulse-mode", pulse_mode, "alternating | identical")->capture_default_str();
  }

  SchemeConfig build(bool exact) const {
    SchemeConfig c;
    try {
      c.scheme = parse_scheme(scheme);
    } catch (const Error& e) {
      throw FlagError("--scheme", e.what());
    }
    try {
      c.probe = parse_probe(probe);
    } catch (const Error& e) {
      throw FlagError("--probe", e.what());
    }
    if (n < 1) throw FlagError("--N", "must be at least 1");
    c.dims = EnsembleDims(n);
    try {
      const auto v = parse_triple(b);
      c.field = {v[0], v[1], v[2], gamma};
    } catch (const Error& e) {
      throw FlagError("--B", e.what());
    }
    if (!durations.empty()) {
      try {
        const auto parts = split(durations, ',');
        if (parts.size() == 1) {
          const double t = parse_angle(parts[0]);
          c.durations = {t, t, t};
        } else {
          c.durations = parse_triple(durations);
        }
      } catch (const Error& e) {
        throw FlagError("--T", e.what());
      }
      for (double t : c.durations) {
        if (!(t >= 0.0)) throw FlagError("--T", "durations must be non-negative");
      }
    }
    if (!(tau > 0.0)) throw FlagError("--tau", "must be positive");
    c.tau = tau;
    try {
      c.pulse_mode = parse_pulse_mode(pulse_mode);
    } catch (const Error& e) {
      throw FlagError("--pulse-mode", e.what());
    }
    c.evolution = exact ? Evolution::exact_pulsed : Evolution::analytic_effective;
    return c;
  }
};

struct CommonFlags {
  std::string output;
  int workers = 0;
  std::uint64_t seed = 1;

  void add(CLI::App* app, bool with_seed = true) {
    app->add_option("-o,--output", output, "output file (default stdout)");
    app->add_option("--workers", workers, "worker threads (default VECMAG_WORKERS or all cores)");
    if (with_seed) app->add_option("--seed", seed, "random seed")->capture_default_str();
  }
};

json metadata(const std::string& command, std::uint64_t seed) {
  return {{"tool", "vecmag"}, {"version", version()}, {"command", command}, {"seed", seed}, {"rng", kRngName}};
}

template <class Fn>
void with_output(const std::string& path, std::ostream& out, Fn&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FlagError("--output", "cannot open '" + path + "' for writing");
  write(f);
  if (!f) throw FlagError("--output", "failed writing '" + path + "'");
}

Axis axis_flag(const std::string& text) {
  try {
    return parse_axis(text);
  } catch (const Error& e) {
    throw FlagError("--axis", e.what());
  }
}

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
  SchemeFlags scheme;
  CommonFlags common;
  std::string grid = "0:6:2048";
  std::string axis = "x";

  void add(CLI::App* app) {
    scheme.add(app, "2,2,2", "parallel");
    common.add(app, false);
    app->add_option("--evolution", scheme.evolution, "analytic | effective | exact")->capture_default_str();
    app->add_option("--grid", grid, "interrogation times start:stop:points")->capture_default_str();
    app->add_option("--axis", axis, "parallel interferometer read out (x, y, z)")->capture_default_str();
  }

  int run(std::ostream& out) const {
    const std::string& ev = scheme.evolution;
    if (ev != "analytic" && ev != "effective" && ev != "exact") {
      throw FlagError("--evolution", "expected analytic, effective or exact, got '" + ev + "'");
    }
    const SchemeConfig base = scheme.build(ev == "exact");
    const Axis a = axis_flag(axis);
    std::vector<double> times;
    try {
      times = parse_grid(grid);
    } catch (const Error& e) {
      throw FlagError("--grid", e.what());
    }
    if (ev == "analytic" && base.analytic_requires_even_n() && base.dims.particles() % 2) {
      throw FlagError("--N", "closed-form GHZ signal needs even N; use --evolution effective");
    }
    const CollectiveOperator jz = collective_operator(base.dims, Axis::z);
    std::vector<double> values(times.size());
    parallel_for(times.size(), resolve_workers(common.workers), [&](std::size_t i) {
      const SchemeConfig c = base.with_uniform_time(times[i]);
      values[i] = ev == "analytic" ? chain_sign(c, a) * analytic_jz(c, a) : expectation(final_state(c, a), jz);
    });

    Table t;
    t.metadata = metadata("simulate", common.seed);
    json cfg = to_json(base);
    cfg["evolution"] = ev;
    cfg.erase("T");
    t.metadata["config"] = cfg;
    t.metadata["axis"] = to_string(a);
    t.metadata["grid"] = grid;
    t.columns = {"T", "jz"};
    for (std::size_t i = 0; i < times.size(); ++i) t.add_row({format_number(times[i]), format_number(values[i])});
    with_output(common.output, out, [&](std::ostream& os) { write_table(os, t); });
    return kOk;
  }
};

// ---------------------------------------------------------------- spectrum

struct SpectrumCmd {
  SchemeFlags scheme;
  CommonFlags common;
  double t_max = 12.8;
  int m = 4096;
  std::string method = "amplitude-rule";
  std::string source = "simulated";
  std::string field_output;
  bool no_signs = false;

  void add(CLI::App* app) {
    scheme.add(app, "10,6,2", "sequential");
    common.add(app, false);
    app->add_option("--t-max", t_max, "length of the sampled T window")->capture_default_str();
    app->add_option("--M", m, "number of samples (power of two)")->capture_default_str();
    app->add_option("--method", method, "amplitude-rule | paper-rule")->capture_default_str();
    app->add_option("--source", source, "analytic | simulated")->capture_default_str();
    app->add_option("--field-output", field_output, "write the recovered field as JSON here");
    app->add_flag("--no-signs", no_signs, "skip the sign fit and report |By|, |Bz|");
  }

  int run(std::ostream& out) const {
    const SchemeConfig c = scheme.build(false);
    if (c.scheme != Scheme::sequential) throw FlagError("--scheme", "spectral recovery needs the sequential scheme");
    if (!(t_max > 0.0)) throw FlagError("--t-max", "must be positive");
    if (m < 8 || (m & (m - 1)) != 0) throw FlagError("--M", "must be a power of two >= 8");
    TraceSource src;
    if (source == "analytic") {
      src = TraceSource::analytic;
    } else if (source == "simulated") {
      src = TraceSource::simulated;
    } else {
      throw FlagError("--source", "expected analytic or simulated, got '" + source + "'");
    }
    RecoveryMethod rm;
    try {
      rm = parse_recovery_method(method);
    } catch (const Error& e) {
      throw FlagError("--method", e.what());
    }
    if (src == TraceSource::analytic && c.analytic_requires_even_n() && c.dims.particles() % 2) {
      throw FlagError("--N", "closed-form GHZ signal needs even N; use --source simulated");
    }
    const double scale = c.probe == Probe::ghz ? c.dims.particles() : 1.0;
    const SignalTrace trace = sample_signal(c, t_max, m, src, Axis::x, resolve_workers(common.workers));
    const Spectrum s = fft_spectrum(trace);
    const auto peaks = extract_peaks(s);
    RecoveredField f = recover_field(peaks, scale, rm, 2.0 * s.bin_width);
    // The unsigned estimate is still written when the sign fit is ambiguous.
    std::unique_ptr<AmbiguousSign> ambiguous;
    if (!no_signs) {
      // The sign fit is a closed-form model fit; odd-N GHZ has no closed form.
      if (c.analytic_requires_even_n() && c.dims.particles() % 2) {
        throw FlagError("--N", "sign resolution needs even N for GHZ; pass --no-signs");
      }
      try {
        f = resolve_signs(f, trace, c);
      } catch (const AmbiguousSign& e) {
        ambiguous = std::make_unique<AmbiguousSign>(e);
      }
    }

    json peak_list = json::array();
    for (const auto& p : peaks) peak_list.push_back(to_json(p));
    Table t;
    t.metadata = metadata("spectrum", common.seed);
    json cfg = to_json(c);
    cfg.erase("T");
    t.metadata["config"] = cfg;
    t.metadata["sampling"] = {{"t_max", t_max}, {"M", m}, {"dt", trace.dt}, {"source", source}};
    t.metadata["bin_width"] = s.bin_width;
    t.metadata["peaks"] = peak_list;
    t.metadata["recovered"] = to_json(f);
    if (ambiguous) t.metadata["ambiguous_sign"] = ambiguous->tied();
    t.columns = {"omega", "magnitude"};
    for (std::size_t k = 0; k < s.omega.size(); ++k) {
      t.add_row({format_number(s.omega[k]), format_number(s.magnitude[k])});
    }
    with_output(common.output, out, [&](std::ostream& os) { write_table(os, t); });
    if (!field_output.empty()) {
      json j = metadata("spectrum", common.seed);
      j["recovered"] = to_json(f);
      j["peaks"] = peak_list;
      if (ambiguous) j["ambiguous_sign"] = ambiguous->tied();
      std::ofstream fo(field_output, std::ios::binary);
      if (!fo) throw FlagError("--field-output", "cannot open '" + field_output + "' for writing");
      fo << j.dump(2) << "\n";
    }
    if (ambiguous) throw *ambiguous;
    return kOk;
  }
};

// ---------------------------------------------------------------- precision

struct PrecisionCmd {
  SchemeFlags scheme;
  CommonFlags common;
  double h = 0.0;

  void add(CLI::App* app) {
    scheme.add(app, "0.3,0.4,0.5", "parallel");
    common.add(app, false);
    app->add_option("--evolution", scheme.evolution, "analytic | exact")->capture_default_str();
    app->add_option("--step", h, "finite-difference step (default 1e-5 max(1,|B|))");
  }

  int run(std::ostream& out) const {
    const std::string& ev = scheme.evolution;
    if (ev != "analytic" && ev != "effective" && ev != "exact") {
      throw FlagError("--evolution", "expected analytic, effective or exact, got '" + ev + "'");
    }
    if (h < 0.0) throw FlagError("--step", "must be positive");
    const SchemeConfig c = scheme.build(ev == "exact");
    const PrecisionReport r = precision_report(c, h > 0.0 ? std::optional<double>(h) : std::nullopt);
    json j = metadata("precision", common.seed);
    j["report"] = to_json(r);
    with_output(common.output, out, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
    return kOk;
  }
};

// ---------------------------------------------------------------- qfi

struct QfiCmd {
  SchemeFlags scheme;
  CommonFlags common;
  std::string grid;

  void add(CLI::App* app) {
    scheme.add(app, "0.3,0.4,0.5", "parallel");
    common.add(app, false);
    app->add_option("--grid", grid, "sweep uniform T start:stop:points and write CSV");
  }

  static json axis_entry(const SchemeConfig& c, Axis a) {
    const double f = qfi_numeric(c, a);
    json e{{"axis", to_string(a)}, {"qfi_numeric", f}, {"qcrb", f > 0.0 ? json(1.0 / std::sqrt(f)) : json(nullptr)}};
    try {
      const AnalyticQfi q = qfi_analytic(c, a);
      e["qfi_analytic_main"] = q.main;
      e["qfi_analytic_appendix"] = q.appendix;
    } catch (const UnsupportedBranch&) {
      e["qfi_analytic_main"] = nullptr;
      e["qfi_analytic_appendix"] = nullptr;
    }
    return e;
  }

  int run(std::ostream& out) const {
    const SchemeConfig c = scheme.build(false);
    if (grid.empty()) {
      json j = metadata("qfi", common.seed);
      j["config"] = to_json(c);
      json axes = json::array();
      for (Axis a : kAxes) axes.push_back(axis_entry(c, a));
      j["axes"] = axes;
      with_output(common.output, out, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
      return kOk;
    }
    std::vector<double> times;
    try {
      times = parse_grid(grid);
    } catch (const Error& e) {
      throw FlagError("--grid", e.what());
    }
    std::vector<std::array<double, 3>> rows(times.size());
    parallel_for(times.size(), resolve_workers(common.workers), [&](std::size_t i) {
      const SchemeConfig ci = c.with_uniform_time(times[i]);
      for (Axis a : kAxes) rows[i][index_of(a)] = qfi_numeric(ci, a);
    });
    Table t;
    t.metadata = metadata("qfi", common.seed);
    json cfg = to_json(c);
    cfg.erase("T");
    t.metadata["config"] = cfg;
    t.metadata["grid"] = grid;
    t.columns = {"T", "F_x", "F_y", "F_z"};
    for (std::size_t i = 0; i < times.size(); ++i) {
      t.add_row({format_number(times[i]), format_number(rows[i][0]), format_number(rows[i][1]),
                 format_number(rows[i][2])});
    }
    with_output(common.output, out, [&](std::ostream& os) { write_table(os, t); });
    return kOk;
  }
};

// ---------------------------------------------------------------- scaling

struct ScalingCmd {
  CommonFlags common;
  std::string n_values = "4:40:2";
  std::string minimize = "joint";
  int grid_points = 96;
  std::string probe = "both";

  void add(CLI::App* app) {
    common.add(app, false);
    app->add_option("--n-values", n_values, "particle numbers a:b:step or a comma list")->capture_default_str();
    app->add_option("--minimize", minimize, "joint | fixed-others")->capture_default_str();
    app->add_option("--grid-points", grid_points, "grid points per field component")->capture_default_str();
    app->add_option("--probe", probe, "scs | ghz | both")->capture_default_str();
  }

  int run(std::ostream& out) const {
    std::vector<int> ns;
    try {
      ns = parse_int_range(n_values);
    } catch (const Error& e) {
      throw FlagError("--n-values", e.what());
    }
    for (int n : ns) {
      if (n < 1) throw FlagError("--n-values", "particle numbers must be positive");
    }
    Minimization mode;
    try {
      mode = parse_minimization(minimize);
    } catch (const Error& e) {
      throw FlagError("--minimize", e.what());
    }
    if (grid_points < 4) throw FlagError("--grid-points", "must be at least 4");
    std::vector<Probe> probes;
    if (probe == "both") {
      probes = {Probe::scs, Probe::ghz};
    } else {
      try {
        probes = {parse_probe(probe)};
      } catch (const Error& e) {
        throw FlagError("--probe", e.what());
      }
    }

    struct Job {
      Probe probe;
      int n;
      std::array<double, 3> db{};
      bool skipped = false;
    };
    std::vector<Job> jobs;
    for (Probe p : probes) {
      for (int n : ns) jobs.push_back({p, n});
    }
    parallel_for(jobs.size(), resolve_workers(common.workers), [&](std::size_t i) {
      Job& j = jobs[i];
      if (j.probe == Probe::ghz && j.n % 2) {
        j.skipped = true;
        return;
      }
      for (Axis a : kAxes) j.db[index_of(a)] = minimize_delta_b(j.probe, j.n, a, mode, grid_points).delta_b;
    });

    Table t;
    t.metadata = metadata("scaling", common.seed);
    t.metadata["config"] = {{"n_values", ns}, {"minimize", to_string(mode)}, {"grid_points", grid_points}, {"T", 1.0}};
    t.columns = {"N", "probe", "dB_x", "dB_y", "dB_z", "note"};
    json fits = json::object();
    for (Probe p : probes) {
      std::array<std::vector<std::pair<double, double>>, 3> pts;
      for (const Job& j : jobs) {
        if (j.probe != p) continue;
        if (j.skipped) {
          t.add_row({std::to_string(j.n), std::string(to_string(p)), "nan", "nan", "nan",
                     "warning: skipped odd N (GHZ closed form needs even N)"});
          continue;
        }
        t.add_row({std::to_string(j.n), std::string(to_string(p)), format_number(j.db[0]), format_number(j.db[1]),
                   format_number(j.db[2]), ""});
        for (int a = 0; a < 3; ++a) pts[a].emplace_back(j.n, j.db[a]);
      }
      json pf = json::object();
      for (Axis a : kAxes) {
        if (pts[index_of(a)].size() < 2) continue;
        const ScalingFit f = scaling_fit(pts[index_of(a)]);
        pf[std::string(to_string(a))] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
      }
      fits[std::string(to_string(p))] = pf;
    }
    t.metadata["fits"] = fits;
    with_output(common.output, out, [&](std::ostream& os) { write_table(os, t); });
    return kOk;
  }
};

// ---------------------------------------------------------------- robustness

struct RobustnessCmd {
  CommonFlags common;
  int n = 10;
  std::string b = "4,5,6";
  std::string probe = "scs";
  std::string eta = "0.06pi";
  std::string mode = "both";
  std::string correlation = "per-pair";
  int trials = 20;
  double tau = 1e-3;
  double axis_time = 2.0;

  void add(CLI::App* app) {
    common.add(app, true);
    app->add_option("--N", n, "number of particles")->capture_default_str();
    app->add_option("--B", b, "field bx,by,bz")->capture_default_str();
    app->add_option("--probe", probe, "initial probe state scs | ghz")->capture_default_str();
    app->add_option("--eta", eta, "pulse-angle error amplitudes, e.g. 0,0.03pi,0.06pi")->capture_default_str();
    app->add_option("--mode", mode, "alternating | identical | both")->capture_default_str();
    app->add_option("--correlation", correlation, "per-pair | per-pulse")->capture_default_str();
    app->add_option("--trials", trials, "Monte-Carlo trials per setting")->capture_default_str();
    app->add_option("--tau", tau, "pulse spacing")->capture_default_str();
    app->add_option("--axis-time", axis_time, "duration of each x, y, z block")->capture_default_str();
  }

  int run(std::ostream& out) const {
    if (n < 1) throw FlagError("--N", "must be at least 1");
    FieldVector field;
    try {
      const auto v = parse_triple(b);
      field = {v[0], v[1], v[2], 1.0};
    } catch (const Error& e) {
      throw FlagError("--B", e.what());
    }
    std::vector<double> etas;
    try {
      etas = parse_angle_list(eta);
    } catch (const Error& e) {
      throw FlagError("--eta", e.what());
    }
    for (double e : etas) {
      if (!(e >= 0.0)) throw FlagError("--eta", "amplitudes must be non-negative");
    }
    std::vector<PulseMode> modes;
    try {
      modes = mode == "both" ? std::vector<PulseMode>{PulseMode::alternating, PulseMode::identical}
                             : std::vector<PulseMode>{parse_pulse_mode(mode)};
    } catch (const Error& e) {
      throw FlagError("--mode", e.what());
    }
    ErrorCorrelation corr;
    try {
      corr = parse_error_correlation(correlation);
    } catch (const Error& e) {
      throw FlagError("--correlation", e.what());
    }
    if (trials < 1) throw FlagError("--trials", "must be positive");
    if (!(tau > 0.0)) throw FlagError("--tau", "must be positive");
    if (!(axis_time > 0.0)) throw FlagError("--axis-time", "must be positive");
    Probe pr;
    try {
      pr = parse_probe(probe);
    } catch (const Error& e) {
      throw FlagError("--probe", e.what());
    }

    const DickeState psi0 = probe_state(EnsembleDims(n), pr);
    const unsigned workers = resolve_workers(common.workers);
    Table t;
    t.metadata = metadata("robustness", common.seed);
    t.metadata["config"] = {{"N", n},
                            {"B", {field.bx, field.by, field.bz}},
                            {"probe", to_string(pr)},
                            {"trials", trials},
                            {"tau", tau},
                            {"axis_time", axis_time},
                            {"correlation", to_string(corr)},
                            {"eta", etas}};
    t.columns = {"eta", "mode", "t", "F2_mean", "F2_std"};
    json summary = json::array();
    for (double e : etas) {
      std::map<PulseMode, F2Result> by_mode;
      for (PulseMode pm : modes) {
        const auto sched = xyz_schedules(axis_time, tau, pm);
        const F2Result r = fidelity_f2(psi0, field, sched, NoiseModel{e, trials, common.seed, corr}, workers);
        for (const auto& s : r.samples) {
          t.add_row({format_number(e), std::string(to_string(pm)), format_number(s.t), format_number(s.mean),
                     format_number(s.stddev)});
        }
        double avg = 0.0;
        for (const auto& s : r.samples) avg += s.mean;
        avg /= static_cast<double>(r.samples.size());
        summary.push_back({{"eta", e}, {"mode", to_string(pm)}, {"min_mean", r.min_mean()}, {"time_avg_mean", avg}});
        by_mode.emplace(pm, r);
      }
      if (by_mode.size() == 2) {
        const auto& alt = by_mode.at(PulseMode::alternating).trial_mean;
        const auto& idn = by_mode.at(PulseMode::identical).trial_mean;
        int wins = 0;
        for (std::size_t i = 0; i < alt.size(); ++i) wins += alt[i] >= idn[i];
        summary.push_back({{"eta", e}, {"alternating_wins_fraction", static_cast<double>(wins) / alt.size()}});
      }
    }
    t.metadata["summary"] = summary;
    with_output(common.output, out, [&](std::ostream& os) { write_table(os, t); });
    return kOk;
  }
};

// ---------------------------------------------------------------- validate

struct ValidateCmd {
  CommonFlags common;
  std::vector<std::string> only;
  std::string format = "json";

  void add(CLI::App* app) {
    common.add(app, true);
    app->add_option("--only", only, "criterion ids, names or tags")->delimiter(',');
    app->add_option("--format", format, "json | text")->capture_default_str();
  }

  int run(std::ostream& out) const {
    if (format != "json" && format != "text") throw FlagError("--format", "expected json or text");
    acceptance::Options opts;
    opts.seed = common.seed;
    opts.workers = resolve_workers(common.workers);
    opts.only = only;
    const auto results = acceptance::run(opts);
    if (results.empty()) throw FlagError("--only", "no criterion matches");
    with_output(common.output, out, [&](std::ostream& os) {
      if (format == "json") {
        os << acceptance::to_json(results, opts).dump(2) << "\n";
      } else {
        os << acceptance::to_text(results);
      }
    });
    for (const auto& r : results) {
      if (!r.passed) return kNumerical;
    }
    return kOk;
  }
};

void report_error(std::ostream& err, const std::string& kind, const std::string& message, json extra = json::object()) {
  json j{{"error", kind}, {"message", message}};
  j.update(extra);
  err << "vecmag: " << message << "\n" << j.dump() << "\n";
}

}  // namespace

std::array<double, 3> parse_triple(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw InvalidArgument("expected three comma-separated values, got '" + text + "'");
  return {parse_angle(parts[0]), parse_angle(parts[1]), parse_angle(parts[2])};
}

std::vector<double> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw InvalidArgument("expected start:stop:points, got '" + text + "'");
  const double start = parse_angle(parts[0]);
  const double stop = parse_angle(parts[1]);
  const int points = parse_int(parts[2]);
  if (points < 1) throw InvalidArgument("grid needs at least one point");
  if (points == 1) return {start};
  if (!(stop > start)) throw InvalidArgument("grid stop must exceed start");
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) out[i] = start + (stop - start) * i / (points - 1);
  return out;
}

std::vector<int> parse_int_range(const std::string& text) {
  std::vector<int> out;
  const auto colon = split(text, ':');
  if (colon.size() == 3) {
    const int a = parse_int(colon[0]);
    const int b = parse_int(colon[1]);
    const int step = parse_int(colon[2]);
    if (step <= 0) throw InvalidArgument("range step must be positive");
    if (b < a) throw InvalidArgument("range end must not precede start");
    for (int v = a; v <= b; v += step) out.push_back(v);
    return out;
  }
  if (colon.size() != 1) throw InvalidArgument("expected a:b:step or a comma list, got '" + text + "'");
  for (const auto& p : split(text, ',')) out.push_back(parse_int(p));
  if (out.empty()) throw InvalidArgument("empty list");
  return out;
}

double parse_angle(const std::string& raw) {
  std::string text = trim(raw);
  double divisor = 1.0;
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    divisor = parse_plain(text.substr(slash + 1));
    if (divisor == 0.0) throw InvalidArgument("division by zero in '" + raw + "'");
    text = text.substr(0, slash);
  }
  double value;
  if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
    std::string coef = text.substr(0, text.size() - 2);
    if (!coef.empty() && coef.back() == '*') coef.pop_back();
    const double c = coef.empty() ? 1.0 : coef == "-" ? -1.0 : parse_plain(coef);
    value = c * M_PI;
  } else {
    value = parse_plain(text);
  }
  value /= divisor;
  if (!std::isfinite(value)) throw InvalidArgument("not a finite number: '" + raw + "'");
  return value;
}

std::vector<double> parse_angle_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_angle(p));
  if (out.empty()) throw InvalidArgument("empty list");
  return out;
}

unsigned resolve_workers(int flag) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("VECMAG_WORKERS"); env && *env) {
    try {
      const int v = parse_int(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const Error&) {
    }
    throw FlagError("VECMAG_WORKERS", std::string("expected a positive integer, got '") + env + "'");
  }
  return available_workers();
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vector DC magnetometry with collective spins", "vecmag"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  SimulateCmd simulate;
  SpectrumCmd spectrum;
  PrecisionCmd precision;
  QfiCmd qfi;
  ScalingCmd scaling;
  RobustnessCmd robustness;
  ValidateCmd validate;
  auto* s_sim = app.add_subcommand("simulate", "<Jz> versus interrogation time");
  simulate.add(s_sim);
  auto* s_spec = app.add_subcommand("spectrum", "FFT of a sequential trace and field recovery");
  spectrum.add(s_spec);
  auto* s_prec = app.add_subcommand("precision", "observables, delta B and QFI per axis");
  precision.add(s_prec);
  auto* s_qfi = app.add_subcommand("qfi", "quantum Fisher information per axis");
  qfi.add(s_qfi);
  auto* s_scal = app.add_subcommand("scaling", "minimized delta B versus N");
  scaling.add(s_scal);
  auto* s_rob = app.add_subcommand("robustness", "F2 under pulse-angle errors");
  robustness.add(s_rob);
  auto* s_val = app.add_subcommand("validate", "run the acceptance suite");
  validate.add(s_val);

  std::vector<const char*> args;
  for (const auto& a : argv) args.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(args.size()), args.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadFlags;
  }

  try {
    if (*s_sim) return simulate.run(out);
    if (*s_spec) return spectrum.run(out);
    if (*s_prec) return precision.run(out);
    if (*s_qfi) return qfi.run(out);
    if (*s_scal) return scaling.run(out);
    if (*s_rob) return robustness.run(out);
    if (*s_val) return validate.run(out);
  } catch (const UnderResolved& e) {
    report_error(err, "under-resolved", e.what(), {{"found", e.found()}, {"wanted", e.wanted()}});
    return kOutOfRegime;
  } catch (const OutOfRegime& e) {
    report_error(err, "out-of-regime", e.what());
    return kOutOfRegime;
  } catch (const AmbiguousSign& e) {
    report_error(err, "ambiguous-sign", e.what(), {{"tied", e.tied()}});
    return kOutOfRegime;
  } catch (const UnsupportedBranch& e) {
    report_error(err, "unsupported-branch", e.what());
    return kBadFlags;
  } catch (const InvalidArgument& e) {
    report_error(err, "invalid-argument", e.what());
    return kBadFlags;
  } catch (const NumericalError& e) {
    report_error(err, "numerical", e.what());
    return kNumerical;
  } catch (const Error& e) {
    report_error(err, "numerical", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return kNumerical;
  }
  return kBadFlags;
}

}  // namespace vecmag::cli
