#include "vecmag/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>

#include <fftw3.h>

#include "vecmag/parallel.hpp"

namespace vecmag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// FFTW's planner is not reentrant.
std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

}  // namespace

std::vector<double> SignalTrace::times() const {
  std::vector<double> t(values.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = time(k);
  return t;
}

SignalTrace SignalTrace::from_samples(const std::vector<double>& times, std::vector<double> values) {
  if (times.size() != values.size()) throw DimensionMismatch("trace: times and values differ in length");
  if (times.size() < 2) throw InvalidArgument("trace needs at least two samples");
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw InvalidArgument("trace times must increase");
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double expected = times.front() + static_cast<double>(k) * dt;
    if (std::abs(times[k] - expected) > 1e-9 * (std::abs(expected) + dt)) {
      std::ostringstream os;
      os << "trace grid is not uniform at sample " << k << " (T = " << times[k] << ", expected "
         << expected << ")";
      throw InvalidArgument(os.str());
    }
  }
  return SignalTrace{times.front(), dt, std::move(values)};
}

SignalTrace sample_signal(const SchemeConfig& config, double t_max, int m, TraceSource source,
                          Axis axis, unsigned workers) {
  if (!is_power_of_two(m) || m < 2) {
    throw InvalidArgument("sample count M must be a power of two >= 2, got " + std::to_string(m));
  }
  if (!(t_max > 0.0)) throw InvalidArgument("T_max must be positive");
  SignalTrace trace{0.0, t_max / m, std::vector<double>(static_cast<std::size_t>(m))};
  if (source == TraceSource::analytic) {
    const double sign = chain_sign(config, axis);
    for (int k = 0; k < m; ++k) {
      trace.values[k] = sign * analytic_jz(config.with_uniform_time(trace.time(k)), axis);
    }
    return trace;
  }
  const CollectiveOperator jz = collective_operator(config.dims, Axis::z);
  parallel_for(static_cast<std::size_t>(m), workers, [&](std::size_t k) {
    trace.values[k] = expectation(final_state(config.with_uniform_time(trace.time(k)), axis), jz);
  });
  return trace;
}

Spectrum fft_spectrum(const SignalTrace& trace) {
  const int m = static_cast<int>(trace.size());
  if (m < 2) throw InvalidArgument("spectrum needs at least two samples");
  if (!(trace.dt > 0.0)) throw InvalidArgument("trace spacing must be positive");
  const int bins = m / 2 + 1;
  double* in = fftw_alloc_real(m);
  fftw_complex* out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(m, in, out, FFTW_ESTIMATE);
  }
  std::copy(trace.values.begin(), trace.values.end(), in);
  fftw_execute(plan);

  Spectrum s;
  s.bin_width = 2.0 * M_PI / (m * trace.dt);
  s.omega.resize(bins);
  s.magnitude.resize(bins);
  for (int k = 0; k < bins; ++k) {
    const double mag = std::hypot(out[k][0], out[k][1]) / m;
    const bool edge = k == 0 || (m % 2 == 0 && k == m / 2);
    s.omega[k] = k * s.bin_width;
    s.magnitude[k] = edge ? mag : 2.0 * mag;
  }
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return s;
}

std::vector<SpectrumPeak> extract_peaks(const Spectrum& spectrum, const PeakOptions& opt) {
  const auto& mag = spectrum.magnitude;
  const int n = static_cast<int>(mag.size());
  if (n < 3) throw InvalidArgument("spectrum too short for peak search");
  if (opt.count < 1) throw InvalidArgument("peak count must be positive");

  std::vector<int> maxima;
  for (int i = 1; i + 1 < n; ++i) {
    if (mag[i] > mag[i - 1] && mag[i] >= mag[i + 1]) maxima.push_back(i);
  }
  std::stable_sort(maxima.begin(), maxima.end(), [&](int a, int b) { return mag[a] > mag[b]; });

  std::vector<int> chosen;
  const double floor = maxima.empty() ? 0.0 : opt.relative_floor * mag[maxima.front()];
  for (int i : maxima) {
    if (static_cast<int>(chosen.size()) == opt.count) break;
    if (!(mag[i] > 0.0) || mag[i] < floor) break;
    const bool clear = std::all_of(chosen.begin(), chosen.end(), [&](int j) {
      return std::abs(i - j) >= opt.min_separation_bins;
    });
    if (clear) chosen.push_back(i);
  }
  if (static_cast<int>(chosen.size()) < opt.count) {
    std::ostringstream os;
    os << "spectrum is under-resolved: found " << chosen.size() << " of " << opt.count
       << " separated peaks";
    throw UnderResolved(os.str(), static_cast<int>(chosen.size()), opt.count);
  }

  std::vector<SpectrumPeak> peaks;
  const double tiny = std::numeric_limits<double>::min();
  for (int i : chosen) {
    const double a = std::log(std::max(mag[i - 1], tiny));
    const double b = std::log(std::max(mag[i], tiny));
    const double c = std::log(std::max(mag[i + 1], tiny));
    const double curv = a - 2.0 * b + c;
    double delta = curv < 0.0 ? 0.5 * (a - c) / curv : 0.0;
    delta = std::clamp(delta, -0.5, 0.5);
    peaks.push_back({(i + delta) * spectrum.bin_width, std::exp(b - 0.25 * (a - c) * delta)});
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const SpectrumPeak& x, const SpectrumPeak& y) { return x.amplitude > y.amplitude; });
  return peaks;
}

std::string_view to_string(RecoveryMethod m) {
  return m == RecoveryMethod::amplitude_rule ? "amplitude-rule" : "paper-rule";
}

RecoveryMethod parse_recovery_method(std::string_view text) {
  if (text == "amplitude-rule" || text == "amplitude") return RecoveryMethod::amplitude_rule;
  if (text == "paper-rule" || text == "paper") return RecoveryMethod::paper_rule;
  throw InvalidArgument("unknown recovery method '" + std::string(text) +
                        "' (expected amplitude-rule or paper-rule)");
}

std::array<double, 6> six_frequencies(double bx, double by, double bz, double s) {
  return {s * (bx + by + bz), s * (bx + by - bz), s * (bx - by + bz),
          s * (bx - by - bz), s * (bx + bz),      s * (bx - bz)};
}

namespace {

void finish_recovery(RecoveredField& f, const std::vector<SpectrumPeak>& peaks, double tolerance) {
  const auto synth = six_frequencies(f.bx, f.by, f.bz, f.scale);
  if (*std::min_element(synth.begin(), synth.end()) <= 0.0) {
    std::ostringstream os;
    os << "field outside the recoverable regime Bx > |By| + |Bz| (Bx = " << f.bx << ", |By| = " << f.by
       << ", |Bz| = " << f.bz << ")";
    throw OutOfRegime(os.str());
  }
  std::vector<double> a(synth.begin(), synth.end());
  std::vector<double> b;
  for (const auto& p : peaks) b.push_back(p.omega);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double worst = 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
    ss += (a[i] - b[i]) * (a[i] - b[i]);
  }
  f.frequency_mismatch = worst;
  f.residual = std::sqrt(ss / 6.0);
  f.consistent = worst <= tolerance;
}

}  // namespace

RecoveredField recover_field(const std::vector<SpectrumPeak>& peaks, double scale,
                             RecoveryMethod method, double tolerance) {
  if (peaks.size() != 6) {
    throw InvalidArgument("field recovery needs exactly six peaks, got " + std::to_string(peaks.size()));
  }
  if (!(scale > 0.0)) throw InvalidArgument("frequency scale must be positive");
  RecoveredField f;
  f.method = method;
  f.scale = scale;

  if (method == RecoveryMethod::amplitude_rule) {
    std::vector<SpectrumPeak> sorted = peaks;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const SpectrumPeak& x, const SpectrumPeak& y) { return x.amplitude > y.amplitude; });
    const double w5 = sorted[0].omega / scale;
    const double w6 = sorted[1].omega / scale;
    f.bx = 0.5 * (w5 + w6);
    f.bz = 0.5 * std::abs(w5 - w6);
    std::array<double, 4> d;
    for (int i = 0; i < 4; ++i) d[i] = sorted[2 + i].omega / scale - f.bx;
    std::sort(d.begin(), d.end());
    const double z = f.bz;
    // Sorted offsets are -b-z, -b+z, b-z, b+z when |By| >= |Bz|, else -b-z, b-z, -b+z, b+z.
    const std::array<std::array<double, 4>, 2> estimates{{
        {-d[0] - z, z - d[1], d[2] + z, d[3] - z},
        {-d[0] - z, d[1] + z, z - d[2], d[3] - z},
    }};
    double best_spread = kInf;
    for (const auto& e : estimates) {
      const double mean = std::accumulate(e.begin(), e.end(), 0.0) / 4.0;
      double spread = 0.0;
      for (double v : e) spread += (v - mean) * (v - mean);
      if (spread < best_spread) {
        best_spread = spread;
        f.by = std::max(0.0, mean);
      }
    }
  } else {
    double sum = 0.0;
    for (const auto& p : peaks) sum += p.omega;
    f.bx = sum / (6.0 * scale);
    std::array<double, 6> v;
    for (int i = 0; i < 6; ++i) v[i] = std::abs(peaks[i].omega / scale - f.bx);
    std::sort(v.begin(), v.end());
    const double lo = 0.5 * (v[0] + v[1]);
    const double mid = 0.5 * (v[2] + v[3]);
    const double hi = 0.5 * (v[4] + v[5]);
    f.bz = mid;
    f.by = 0.5 * (hi - lo);
  }
  finish_recovery(f, peaks, tolerance);
  return f;
}

namespace {

struct SignFit {
  FieldVector field;
  double residual = kInf;
};

class TraceModel {
 public:
  TraceModel(const SignalTrace& trace, const SchemeConfig& model)
      : trace_(trace), model_(model), sign_(chain_sign(model, Axis::x)) {
    energy_ = 0.0;
    for (double y : trace.values) energy_ += y * y;
  }

  Eigen::VectorXd residuals(const Eigen::Vector3d& p) const {
    Eigen::VectorXd r(trace_.size());
    SchemeConfig c = model_.with_field({p[0], p[1], p[2], model_.field.gamma});
    for (std::size_t k = 0; k < trace_.size(); ++k) {
      const double t = trace_.time(k);
      c.durations = {t, t, t};
      r[static_cast<Eigen::Index>(k)] = sign_ * analytic_jz(c, Axis::x) - trace_.values[k];
    }
    return r;
  }

  double normalized(double cost) const {
    return energy_ > 0.0 ? cost / energy_ : cost / static_cast<double>(trace_.size());
  }

 private:
  const SignalTrace& trace_;
  SchemeConfig model_;
  double sign_;
  double energy_ = 0.0;
};

SignFit levenberg_marquardt(const TraceModel& model, Eigen::Vector3d p) {
  Eigen::VectorXd r = model.residuals(p);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  for (int iter = 0; iter < 100 && cost > 0.0; ++iter) {
    Eigen::MatrixXd jac(r.size(), 3);
    for (int j = 0; j < 3; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(p[j]));
      Eigen::Vector3d hi = p, lo = p;
      hi[j] += h;
      lo[j] -= h;
      jac.col(j) = (model.residuals(hi) - model.residuals(lo)) / (2.0 * h);
    }
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d grad = jac.transpose() * r;
    bool improved = false;
    while (lambda < 1e12) {
      Eigen::Matrix3d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::Vector3d step = a.ldlt().solve(-grad);
      const Eigen::Vector3d trial = p + step;
      const Eigen::VectorXd rt = model.residuals(trial);
      const double ct = rt.squaredNorm();
      if (ct < cost) {
        const double gain = (cost - ct) / cost;
        p = trial;
        r = rt;
        cost = ct;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = gain > 1e-14;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  return {{p[0], p[1], p[2], 1.0}, model.normalized(cost)};
}

}  // namespace

RecoveredField resolve_signs(const RecoveredField& candidate, const SignalTrace& trace,
                             const SchemeConfig& model) {
  if (model.scheme != Scheme::sequential) {
    throw InvalidArgument("sign resolution uses the sequential-scheme signal model");
  }
  if (trace.size() < 4) throw InvalidArgument("sign resolution needs at least four samples");
  const TraceModel tm(trace, model);
  static constexpr std::array<std::array<int, 2>, 4> kSigns{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
  static const std::array<std::string, 4> kLabels{"+By,+Bz", "+By,-Bz", "-By,+Bz", "-By,-Bz"};

  std::array<SignFit, 4> fits;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d start(candidate.bx, kSigns[i][0] * std::abs(candidate.by),
                                kSigns[i][1] * std::abs(candidate.bz));
    fits[i] = levenberg_marquardt(tm, start);
  }
  std::array<int, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return fits[a].residual < fits[b].residual; });
  std::vector<std::string> tied;
  for (int i : order) {
    if (std::abs(fits[i].residual - fits[order[0]].residual) <= 1e-9) tied.push_back(kLabels[i]);
  }
  if (tied.size() > 1) {
    std::string list;
    for (const auto& t : tied) list += (list.empty() ? "" : "; ") + t;
    throw AmbiguousSign("sign fit is ambiguous: residuals tie for " + list, tied);
  }

  RecoveredField out = candidate;
  const SignFit& best = fits[order[0]];
  out.bx = best.field.bx;
  out.by = best.field.by;
  out.bz = best.field.bz;
  out.residual = best.residual;
  out.signs_resolved = true;
  for (int i = 0; i < 4; ++i) out.sign_residuals[i] = fits[i].residual;
  return out;
}

ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw InvalidArgument("scaling fit needs at least three points");
  std::vector<double> x, y;
  for (const auto& [n, db] : points) {
    if (!(n > 0.0) || !(db > 0.0) || !std::isfinite(db)) {
      throw InvalidArgument("scaling fit needs positive, finite N and dB values");
    }
    x.push_back(std::log(n));
    y.push_back(std::log(db));
  }
  const double k = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / k;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("scaling fit needs at least two distinct N");
  ScalingFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

std::string_view to_string(Minimization m) {
  return m == Minimization::joint ? "joint" : "fixed-others";
}

Minimization parse_minimization(std::string_view text) {
  if (text == "joint") return Minimization::joint;
  if (text == "fixed-others" || text == "fixed_others" || text == "fixed") return Minimization::fixed_others;
  throw InvalidArgument("unknown minimization '" + std::string(text) + "' (expected joint or fixed-others)");
}

DeltaBMinimum minimize_delta_b(Probe probe, int n, Axis axis, Minimization mode, int grid_points) {
  if (n < 1) throw InvalidArgument("particle count must be positive");
  if (probe == Probe::ghz && n % 2 != 0) {
    throw UnsupportedBranch("GHZ closed form requires even N, got N=" + std::to_string(n));
  }
  if (grid_points < 4) throw InvalidArgument("grid needs at least four points per axis");
  const double k = probe == Probe::ghz ? n : 1.0;
  auto eval = [&](const std::array<double, 3>& b) {
    for (double v : b) {
      if (!(v > 0.0 && v < M_PI)) return kInf;
    }
    return sequential_delta_b_unit(probe, n, axis, PhaseTrig::of(k * b[0], k * b[1], k * b[2]));
  };

  std::array<double, 3> best{1.0, 1.0, 1.0};
  double best_value = kInf;
  const int a = index_of(axis);
  double step = 0.0;

  if (mode == Minimization::joint) {
    // The closed form depends on B only through the phases kB, and for GHZ kB
    // sweeps a full period inside (0, 2pi/N); gridding that period keeps the
    // phase resolution independent of N.
    const int g = grid_points;
    const double span = probe == Probe::ghz && n >= 2 ? 2.0 * M_PI / k : M_PI;
    step = span / g;
    std::vector<double> s(g), c(g);
    for (int i = 0; i < g; ++i) {
      const double b = (i + 0.5) * step;
      s[i] = std::sin(k * b);
      c[i] = std::cos(k * b);
    }
    for (int ix = 0; ix < g; ++ix) {
      for (int iy = 0; iy < g; ++iy) {
        for (int iz = 0; iz < g; ++iz) {
          const double v = sequential_delta_b_unit(probe, n, axis, {s[ix], c[ix], s[iy], c[iy], s[iz], c[iz]});
          if (v < best_value) {
            best_value = v;
            best = {(ix + 0.5) * step, (iy + 0.5) * step, (iz + 0.5) * step};
          }
        }
      }
    }
  } else {
    const int g = std::max(grid_points * grid_points, 64 * n);
    step = M_PI / g;
    for (int i = 0; i < g; ++i) {
      std::array<double, 3> b{1.0, 1.0, 1.0};
      b[a] = (i + 0.5) * step;
      const double v = eval(b);
      if (v < best_value) {
        best_value = v;
        best = b;
      }
    }
  }
  if (!std::isfinite(best_value)) {
    throw NumericalError("closed-form dB is infinite on the whole grid");
  }

  // Compass search on the free coordinates.
  while (step > 1e-12) {
    bool moved = false;
    for (int d = 0; d < 3; ++d) {
      if (mode == Minimization::fixed_others && d != a) continue;
      for (double dir : {1.0, -1.0}) {
        std::array<double, 3> trial = best;
        trial[d] += dir * step;
        const double v = eval(trial);
        if (v < best_value) {
          best_value = v;
          best = trial;
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return {best_value, {best[0], best[1], best[2], 1.0}};
}

nlohmann::json to_json(const RecoveredField& f) {
  nlohmann::json j{{"bx", f.bx},
                   {"by", f.by},
                   {"bz", f.bz},
                   {"method", to_string(f.method)},
                   {"residual", f.residual},
                   {"scale", f.scale},
                   {"consistent", f.consistent},
                   {"frequency_mismatch", f.frequency_mismatch},
                   {"signs_resolved", f.signs_resolved}};
  if (f.signs_resolved) {
    j["sign_residuals"] = {{"+By,+Bz", f.sign_residuals[0]},
                           {"+By,-Bz", f.sign_residuals[1]},
                           {"-By,+Bz", f.sign_residuals[2]},
                           {"-By,-Bz", f.sign_residuals[3]}};
  }
  return j;
}

nlohmann::json to_json(const SpectrumPeak& p) { return {{"omega", p.omega}, {"amplitude", p.amplitude}}; }

}  // namespace vecmag
