#include "vecmag/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace vecmag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDenominatorFloor = 1e-12;
constexpr double kVarianceFloor = 1e-10;
constexpr double kRichardsonTrigger = 1e-6;

void require_even(const SchemeConfig& c, const char* what) {
  if (c.analytic_requires_even_n() && !c.dims.integer_spin()) {
    throw UnsupportedBranch(std::string(what) + ": GHZ closed form requires even N, got N=" +
                            std::to_string(c.dims.particles()));
  }
}

double parity_sign(const EnsembleDims& dims) {
  // (-1)^J for integer J.
  return (dims.particles() / 2) % 2 == 0 ? 1.0 : -1.0;
}

class OperatorSet {
 public:
  explicit OperatorSet(const EnsembleDims& dims) : dims_(dims) {}

  const SpectralGenerator& linear(Axis a) {
    auto& slot = linear_[index_of(a)];
    if (!slot) slot = std::make_unique<SpectralGenerator>(collective_operator(dims_, a));
    return *slot;
  }
  const SpectralGenerator& square(Axis a) {
    auto& slot = square_[index_of(a)];
    if (!slot) slot = std::make_unique<SpectralGenerator>(collective_operator(dims_, a).squared());
    return *slot;
  }

 private:
  EnsembleDims dims_;
  std::array<std::unique_ptr<SpectralGenerator>, 3> linear_;
  std::array<std::unique_ptr<SpectralGenerator>, 3> square_;
};

Vector apply_step(const SchemeConfig& c, const ChainStep& s, const Vector& psi, OperatorSet& ops) {
  switch (s.kind) {
    case StepKind::rotation: return ops.linear(s.axis).apply(s.angle, psi);
    case StepKind::twist: return ops.square(s.axis).apply(s.angle, psi);
    case StepKind::accumulate: {
      const double t = c.duration(s.axis);
      if (t == 0.0) return psi;
      if (c.evolution == Evolution::analytic_effective) {
        return ops.linear(s.axis).apply(c.field.coupling(s.axis) * t, psi);
      }
      const DDSchedule block = DDSchedule::covering(s.axis, t, c.tau, c.pulse_mode);
      return evolve_exact(DickeState::normalized(c.dims, psi), c.field,
                          std::span<const DDSchedule>(&block, 1))
          .amplitudes();
    }
  }
  return psi;
}

DickeState run_chain(const SchemeConfig& c, const ChainSpec& chain, OperatorSet& ops) {
  Vector psi = probe_state(c.dims, c.probe).amplitudes();
  if (chain.preparation) psi = apply_step(c, *chain.preparation, psi, ops);
  for (auto it = chain.steps.rbegin(); it != chain.steps.rend(); ++it) {
    psi = apply_step(c, *it, psi, ops);
  }
  return DickeState::normalized(c.dims, psi);
}

ChainStep rot(Axis a, double angle) { return {StepKind::rotation, a, angle}; }
ChainStep twist(Axis a, double angle) { return {StepKind::twist, a, angle}; }
ChainStep acc(Axis a) { return {StepKind::accumulate, a, 0.0}; }

std::string angle_text(double angle) {
  // Chains only use ±π/2; the exponent is -i·angle.
  std::ostringstream os;
  const double q = -angle / M_PI;
  os << (q >= 0 ? "+" : "-");
  if (std::abs(std::abs(q) - 0.5) < 1e-12) {
    os << "iπ/2";
  } else {
    os << "i" << std::abs(q) << "π";
  }
  return os.str();
}

}  // namespace

std::string_view to_string(Scheme s) { return s == Scheme::parallel ? "parallel" : "sequential"; }
std::string_view to_string(Probe p) { return p == Probe::scs ? "scs" : "ghz"; }
std::string_view to_string(Evolution e) {
  return e == Evolution::analytic_effective ? "effective" : "exact";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "parallel") return Scheme::parallel;
  if (text == "sequential") return Scheme::sequential;
  throw InvalidArgument("unknown scheme '" + std::string(text) + "' (expected parallel or sequential)");
}

Probe parse_probe(std::string_view text) {
  if (text == "scs" || text == "SCS") return Probe::scs;
  if (text == "ghz" || text == "GHZ") return Probe::ghz;
  throw InvalidArgument("unknown probe '" + std::string(text) + "' (expected scs or ghz)");
}

Evolution parse_evolution(std::string_view text) {
  if (text == "effective" || text == "analytic-effective" || text == "analytic") {
    return Evolution::analytic_effective;
  }
  if (text == "exact" || text == "exact-pulsed") return Evolution::exact_pulsed;
  throw InvalidArgument("unknown evolution '" + std::string(text) + "' (expected effective or exact)");
}

SchemeConfig SchemeConfig::with_field(const FieldVector& f) const {
  SchemeConfig out = *this;
  out.field = f;
  return out;
}

SchemeConfig SchemeConfig::with_uniform_time(double t) const {
  SchemeConfig out = *this;
  out.durations = {t, t, t};
  return out;
}

std::string ChainStep::describe() const {
  const std::string j = "J" + std::string(to_string(axis));
  switch (kind) {
    case StepKind::rotation: return "e^{" + angle_text(angle) + " " + j + "}";
    case StepKind::twist: return "e^{" + angle_text(angle) + " " + j + "^2}";
    case StepKind::accumulate: return "U_" + std::string(to_string(axis)) + "(T" +
                                      std::string(to_string(axis)) + ")";
  }
  return "?";
}

std::string ChainSpec::describe() const {
  std::string out;
  for (const auto& s : steps) out += s.describe() + " ";
  if (preparation) out += preparation->describe() + " ";
  out += "|probe>";
  return out;
}

ChainSpec parallel_chain(Probe probe, Axis axis) {
  constexpr double h = M_PI / 2;
  if (probe == Probe::scs) {
    switch (axis) {
      case Axis::x: return {{rot(Axis::x, -h), acc(Axis::x)}, std::nullopt, 1};
      case Axis::y: return {{rot(Axis::y, -h), acc(Axis::y)}, std::nullopt, 1};
      case Axis::z: return {{rot(Axis::x, h), acc(Axis::z), rot(Axis::y, h)}, std::nullopt, 1};
    }
  }
  // A Ĵz² readout twist only adds a phase on span{|J,±J>}, so the x and y
  // interferometers read out through a Ĵy² twist instead.
  switch (axis) {
    case Axis::x:
      return {{twist(Axis::y, h), rot(Axis::y, -h), acc(Axis::x), rot(Axis::y, h)}, std::nullopt, -1};
    case Axis::y:
      return {{twist(Axis::y, -h), rot(Axis::x, h), acc(Axis::y), rot(Axis::x, h)}, std::nullopt, 1};
    case Axis::z:
      return {{rot(Axis::x, h), twist(Axis::z, -h), rot(Axis::x, -h), acc(Axis::z)}, std::nullopt, 1};
  }
  return {};
}

ChainSpec sequential_chain(Probe probe) {
  constexpr double h = M_PI / 2;
  if (probe == Probe::scs) {
    return {{rot(Axis::y, h), acc(Axis::z), acc(Axis::y), acc(Axis::x)}, std::nullopt, 1};
  }
  // The GHZ input enters polarized along x.
  return {{twist(Axis::x, -h), acc(Axis::z), twist(Axis::x, -h), rot(Axis::x, h), acc(Axis::y),
           twist(Axis::z, -h), rot(Axis::z, h), acc(Axis::x)},
          rot(Axis::y, h),
          1};
}

DickeState probe_state(const EnsembleDims& dims, Probe probe) {
  return probe == Probe::scs ? scs_state(dims) : ghz_state(dims);
}

DickeState run_chain(const SchemeConfig& config, const ChainSpec& chain) {
  OperatorSet ops(config.dims);
  return run_chain(config, chain, ops);
}

DickeState parallel_final_state(const SchemeConfig& config, Axis axis) {
  return run_chain(config, parallel_chain(config.probe, axis));
}

DickeState sequential_final_state(const SchemeConfig& config) {
  return run_chain(config, sequential_chain(config.probe));
}

DickeState final_state(const SchemeConfig& config, Axis axis) {
  return config.scheme == Scheme::parallel ? parallel_final_state(config, axis)
                                           : sequential_final_state(config);
}

int chain_sign(const SchemeConfig& config, Axis axis) {
  return config.scheme == Scheme::parallel ? parallel_chain(config.probe, axis).sign
                                           : sequential_chain(config.probe).sign;
}

double analytic_jz(const SchemeConfig& c, Axis axis) {
  const double n = c.dims.particles();
  if (c.scheme == Scheme::parallel) {
    const double phi = c.phase(axis);
    if (c.probe == Probe::scs) return n / 2 * std::sin(phi);
    require_even(c, "analytic_jz");
    return n / 2 * std::sin(n * phi);
  }
  const auto [x, y, z] = c.phases();
  if (c.probe == Probe::scs) {
    return n / 4 * (std::cos(x + z) - std::cos(x - z)) -
           n / 8 * (std::sin(x + y + z) + std::sin(x + y - z)) +
           n / 8 * (std::sin(x - y + z) + std::sin(x - y - z));
  }
  require_even(c, "analytic_jz");
  const double X = n * x, Y = n * y, Z = n * z;
  return n / 8 * (std::sin(X + Y + Z) + std::sin(X - Y + Z)) -
         n / 8 * (std::sin(X + Y - Z) + std::sin(X - Y - Z)) -
         parity_sign(c.dims) * n / 4 * (std::sin(X + Z) + std::sin(X - Z));
}

double sequential_g_factor(const SchemeConfig& c) {
  const auto [x, y, z] = c.phases();
  const double b = std::cos(x) * std::sin(y) * std::cos(z) + std::sin(x) * std::sin(z);
  return b * b;
}

double analytic_jz2(const SchemeConfig& c, Axis axis) {
  const double n = c.dims.particles();
  if (c.probe == Probe::ghz) {
    require_even(c, "analytic_jz2");
    return n * n / 4;
  }
  if (c.scheme == Scheme::parallel) {
    const double s = std::sin(c.phase(axis));
    return n / 4 + n * (n - 1) / 4 * s * s;
  }
  return n / 4 + n * (n - 1) / 4 * sequential_g_factor(c);
}

double analytic_jz2_printed(const SchemeConfig& c) {
  if (c.scheme != Scheme::sequential || c.probe != Probe::scs) {
    throw UnsupportedBranch("printed <Jz^2> variant exists only for the sequential SCS scheme");
  }
  const double n = c.dims.particles();
  const auto [x, y, z] = c.phases();
  const double b = std::cos(x) * std::sin(y) * std::cos(z) - std::sin(x) * std::sin(z);
  return n / 4 + n * (n - 1) / 4 * b * b;
}

PhaseTrig PhaseTrig::of(double ax, double ay, double az) {
  return {std::sin(ax), std::cos(ax), std::sin(ay), std::cos(ay), std::sin(az), std::cos(az)};
}

double sequential_delta_b_unit(Probe probe, int n, Axis axis, const PhaseTrig& t) {
  double num = 0.0;
  double den = 0.0;
  double norm = 0.0;
  if (probe == Probe::scs) {
    const double b = t.cx * t.sy * t.cz + t.sx * t.sz;
    num = 1.0 - b * b;
    norm = std::sqrt(static_cast<double>(n));
    switch (axis) {
      case Axis::x: den = t.sx * t.sy * t.cz - t.cx * t.sz; break;
      case Axis::y: den = t.cx * t.cy * t.cz; break;
      case Axis::z: den = t.sx * t.cz - t.cx * t.sy * t.sz; break;
    }
  } else {
    const double sg = (n / 2) % 2 == 0 ? 1.0 : -1.0;
    const double b = t.cx * t.cy * t.sz - sg * t.sx * t.cz;
    num = 1.0 - b * b;
    norm = n;
    switch (axis) {
      case Axis::x: den = t.sx * t.cy * t.sz + sg * t.cx * t.cz; break;
      case Axis::y: den = t.cx * t.sy * t.sz; break;
      case Axis::z: den = t.cx * t.cy * t.cz + sg * t.sx * t.sz; break;
    }
  }
  den = std::abs(den);
  if (den < kDenominatorFloor) return kInf;
  // |b| -> 1 is a Jz eigenstate: signal slope and spread vanish together and the
  // rounded quotient is meaningless.
  if (num < kVarianceFloor) return kInf;
  return std::sqrt(num) / (norm * den);
}

double analytic_delta_b(const SchemeConfig& c, Axis axis) {
  const double n = c.dims.particles();
  const double t = c.duration(axis) * c.field.gamma;
  if (t == 0.0) return kInf;
  if (c.scheme == Scheme::parallel) {
    if (c.probe == Probe::scs) return 1.0 / (std::sqrt(n) * std::abs(t));
    require_even(c, "analytic_delta_b");
    return 1.0 / (n * std::abs(t));
  }
  require_even(c, "analytic_delta_b");
  auto [x, y, z] = c.phases();
  if (c.probe == Probe::ghz) {
    x *= n;
    y *= n;
    z *= n;
  }
  return sequential_delta_b_unit(c.probe, c.dims.particles(), axis, PhaseTrig::of(x, y, z)) /
         std::abs(t);
}

double analytic_delta_b_printed(const SchemeConfig& c, Axis axis) {
  if (c.scheme != Scheme::sequential || c.probe != Probe::scs) return analytic_delta_b(c, axis);
  const double t = c.duration(axis) * c.field.gamma;
  if (t == 0.0) return kInf;
  const auto [x, y, z] = c.phases();
  const double num = std::sqrt(std::max(0.0, 1.0 - sequential_g_factor(c)));
  double den = 0.0;
  switch (axis) {
    case Axis::x: den = std::sin(x) * std::sin(y) * std::cos(z) - std::cos(x) * std::sin(z); break;
    case Axis::y: den = std::sin(x) * std::cos(y) * std::cos(z); break;
    case Axis::z: den = std::cos(x) * std::sin(y) * std::cos(z) - std::sin(x) * std::sin(z); break;
  }
  den = std::abs(den);
  if (den < kDenominatorFloor) return kInf;
  return num / (std::sqrt(static_cast<double>(c.dims.particles())) * std::abs(t) * den);
}

AnalyticQfi qfi_analytic(const SchemeConfig& c, Axis axis) {
  const double n = c.dims.particles();
  const double t = c.duration(axis) * c.field.gamma;
  const double t2 = t * t;
  if (c.scheme == Scheme::parallel) {
    const double f = (c.probe == Probe::scs ? n : n * n) * t2;
    return {f, f};
  }
  const auto [x, y, z] = c.phases();
  (void)z;
  const double cx = std::cos(x), cy = std::cos(y);
  if (c.probe == Probe::scs) {
    double f = 0.0;
    switch (axis) {
      case Axis::x: f = n * t2; break;
      case Axis::y: f = n * t2 * cx * cx; break;
      case Axis::z: f = n * t2 * (1.0 - cx * cx * cy * cy); break;
    }
    return {f, f};
  }
  require_even(c, "qfi_analytic");
  const double n2 = n * n;
  AnalyticQfi out;
  switch (axis) {
    case Axis::x:
      out.main = n2 * t2;
      out.appendix = n2 * t2;
      break;
    case Axis::y:
      out.main = n2 * t2 * cx * cx;
      out.appendix = n2 * t2 * (1.0 + std::cos(2.0 * n * x)) / 2.0;
      break;
    case Axis::z: {
      const double cnx = std::cos(n * x), sny = std::sin(n * y);
      out.main = n2 * t2 * (1.0 - cx * cx * cy * cy);
      out.appendix = n2 * t2 * (1.0 - cnx * cnx * sny * sny);
      break;
    }
  }
  return out;
}

double default_step(const SchemeConfig& c, Axis axis) {
  return 1e-5 * std::max(1.0, std::abs(c.field.component(axis)));
}

namespace {

double qfi_central(const SchemeConfig& c, Axis axis, double h, const ChainSpec& chain,
                   OperatorSet& ops) {
  const double b = c.field.component(axis);
  const Vector psi = run_chain(c, chain, ops).amplitudes();
  const Vector plus = run_chain(c.with_field(c.field.with_component(axis, b + h)), chain, ops).amplitudes();
  const Vector minus = run_chain(c.with_field(c.field.with_component(axis, b - h)), chain, ops).amplitudes();
  const Vector d = (plus - minus) / (2.0 * h);
  const double f = 4.0 * (d.squaredNorm() - std::norm(d.dot(psi)));
  if (!std::isfinite(f)) {
    std::ostringstream os;
    os << "QFI finite difference is not finite (axis " << to_string(axis) << ", h = " << h << ")";
    throw NumericalError(os.str());
  }
  return f;
}

ChainSpec chain_for(const SchemeConfig& c, Axis axis) {
  return c.scheme == Scheme::parallel ? parallel_chain(c.probe, axis) : sequential_chain(c.probe);
}

}  // namespace

double qfi_numeric(const SchemeConfig& c, Axis axis, std::optional<double> h) {
  const double step = h.value_or(default_step(c, axis));
  if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  OperatorSet ops(c.dims);
  const ChainSpec chain = chain_for(c, axis);
  const double coarse = qfi_central(c, axis, step, chain, ops);
  const double fine = qfi_central(c, axis, step / 2, chain, ops);
  const double scale = std::max(std::abs(fine), std::numeric_limits<double>::min());
  if (std::abs(coarse - fine) > kRichardsonTrigger * scale) {
    return std::max(0.0, (4.0 * fine - coarse) / 3.0);
  }
  return std::max(0.0, fine);
}

double delta_b_numeric(const SchemeConfig& c, Axis axis, std::optional<double> h) {
  const double step = h.value_or(default_step(c, axis));
  if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  OperatorSet ops(c.dims);
  const ChainSpec chain = chain_for(c, axis);
  const CollectiveOperator jz = collective_operator(c.dims, Axis::z);
  const double b = c.field.component(axis);
  auto jz_at = [&](double value) {
    return expectation(run_chain(c.with_field(c.field.with_component(axis, value)), chain, ops), jz);
  };
  const double coarse = (jz_at(b + step) - jz_at(b - step)) / (2.0 * step);
  const double fine = (jz_at(b + step / 2) - jz_at(b - step / 2)) / step;
  const double slope = std::abs(coarse - fine) > kRichardsonTrigger * std::abs(fine)
                           ? (4.0 * fine - coarse) / 3.0
                           : fine;
  const double spread = std::sqrt(variance(run_chain(c, chain, ops), jz));
  if (!std::isfinite(slope) || !std::isfinite(spread)) {
    throw NumericalError("error-propagation finite difference is not finite");
  }
  // Round-off in <Jz> (~1e-15 N) divided by the step sets the noise floor of the slope.
  const double n = c.dims.particles();
  if (std::abs(slope) < 1e-8 * n) return kInf;
  return spread / std::abs(slope);
}

PrecisionReport precision_report(const SchemeConfig& c, std::optional<double> h, int trials) {
  if (trials < 1) throw InvalidArgument("trial count must be at least 1");
  PrecisionReport report{c, trials, {}};
  const CollectiveOperator jz = collective_operator(c.dims, Axis::z);
  const double n = c.dims.particles();
  std::optional<DickeState> shared;
  for (Axis a : kAxes) {
    AxisPrecision p;
    p.axis = a;
    if (c.scheme == Scheme::sequential && !shared) shared = sequential_final_state(c);
    const DickeState psi = c.scheme == Scheme::sequential ? *shared : parallel_final_state(c, a);
    p.jz = expectation(psi, jz);
    p.jz2 = expectation(psi, jz.squared());
    p.delta_jz = std::sqrt(std::max(0.0, p.jz2 - p.jz * p.jz));
    try {
      p.delta_b_analytic = analytic_delta_b(c, a);
    } catch (const UnsupportedBranch&) {
    }
    try {
      const AnalyticQfi q = qfi_analytic(c, a);
      p.qfi_analytic_main = q.main;
      p.qfi_analytic_appendix = q.appendix;
    } catch (const UnsupportedBranch&) {
    }
    p.delta_b_numeric = delta_b_numeric(c, a, h);
    p.qfi_numeric = qfi_numeric(c, a, h);
    const double t = c.duration(a) * c.field.gamma;
    p.qcrb = p.qfi_numeric > 0.0 ? 1.0 / std::sqrt(trials * p.qfi_numeric) : kInf;
    p.blind_spot = is_blind_spot(p.delta_b_numeric) || p.qfi_numeric < 1e-6 * n * n * t * t;
    if (!is_blind_spot(p.delta_b_numeric) && !is_blind_spot(p.qcrb)) {
      const double bound = p.qcrb;
      if (p.delta_b_numeric < bound - 1e-9 - 1e-9 * bound) {
        std::ostringstream os;
        os.precision(12);
        os << "axis " << to_string(a) << ": numeric dB = " << p.delta_b_numeric
           << " undercuts the Cramer-Rao bound " << bound;
        throw NumericalError(os.str());
      }
    }
    report.axes.push_back(p);
  }
  return report;
}

namespace {

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json optional_or_null(const std::optional<double>& v) {
  return v ? finite_or_null(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const SchemeConfig& c) {
  nlohmann::json j;
  j["scheme"] = to_string(c.scheme);
  j["probe"] = to_string(c.probe);
  j["N"] = c.dims.particles();
  j["B"] = {c.field.bx, c.field.by, c.field.bz};
  j["gamma"] = c.field.gamma;
  j["T"] = {c.durations[0], c.durations[1], c.durations[2]};
  j["evolution"] = to_string(c.evolution);
  if (c.evolution == Evolution::exact_pulsed) {
    j["tau"] = c.tau;
    j["pulse_mode"] = to_string(c.pulse_mode);
  }
  return j;
}

nlohmann::json to_json(const PrecisionReport& r) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& p : r.axes) {
    axes.push_back({{"axis", to_string(p.axis)},
                    {"jz", p.jz},
                    {"jz2", p.jz2},
                    {"delta_jz", p.delta_jz},
                    {"delta_b_analytic", optional_or_null(p.delta_b_analytic)},
                    {"delta_b_numeric", finite_or_null(p.delta_b_numeric)},
                    {"qfi_analytic_main", optional_or_null(p.qfi_analytic_main)},
                    {"qfi_analytic_appendix", optional_or_null(p.qfi_analytic_appendix)},
                    {"qfi_numeric", p.qfi_numeric},
                    {"qcrb", finite_or_null(p.qcrb)},
                    {"blind_spot", p.blind_spot}});
  }
  return {{"config", to_json(r.config)}, {"trials", r.trials}, {"axes", axes}};
}

}  // namespace vecmag
