#include "vecmag/pulse_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>

#include "vecmag/parallel.hpp"

namespace vecmag {

std::string_view to_string(PulseMode mode) {
  return mode == PulseMode::alternating ? "alternating" : "identical";
}

PulseMode parse_pulse_mode(std::string_view text) {
  if (text == "alternating") return PulseMode::alternating;
  if (text == "identical") return PulseMode::identical;
  throw InvalidArgument("unknown pulse mode '" + std::string(text) +
                        "' (expected alternating or identical)");
}

std::string_view to_string(ErrorCorrelation c) {
  return c == ErrorCorrelation::per_pair ? "per-pair" : "per-pulse";
}

ErrorCorrelation parse_error_correlation(std::string_view text) {
  if (text == "per-pair" || text == "per_pair") return ErrorCorrelation::per_pair;
  if (text == "per-pulse" || text == "per_pulse") return ErrorCorrelation::per_pulse;
  throw InvalidArgument("unknown error correlation '" + std::string(text) +
                        "' (expected per-pair or per-pulse)");
}

DDSchedule DDSchedule::covering(Axis axis, double duration, double tau_target, PulseMode mode) {
  if (!(tau_target > 0.0) || !std::isfinite(tau_target)) {
    throw InvalidArgument("pulse spacing tau must be positive");
  }
  if (duration < 0.0 || !std::isfinite(duration)) {
    throw InvalidArgument("block duration must be non-negative");
  }
  if (duration == 0.0) return DDSchedule{axis, 0, tau_target, mode};
  const double raw = duration / (2.0 * tau_target);
  if (raw > 1e8) throw InvalidArgument("pulse plan needs more than 1e8 pairs; increase tau");
  const int pairs = std::max(1, static_cast<int>(std::lround(raw)));
  return DDSchedule{axis, pairs, duration / (2.0 * pairs), mode};
}

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return Rng(seq);
}

namespace {

class PulsedPropagator {
 public:
  PulsedPropagator(const EnsembleDims& dims, const FieldVector& field)
      : dims_(dims), free_(field_hamiltonian(dims, field)) {}

  const Matrix& free_step(double tau) {
    auto it = free_steps_.find(tau);
    if (it == free_steps_.end()) it = free_steps_.emplace(tau, free_.unitary(tau).matrix).first;
    return it->second;
  }

  const SpectralGenerator& generator(Axis a) {
    auto& slot = pulse_gen_[index_of(a)];
    if (!slot) slot = std::make_unique<SpectralGenerator>(collective_operator(dims_, a));
    return *slot;
  }

  /// e^{-i sign π Ĵα}, cached.
  const Matrix& ideal_pulse(Axis a, int sign) {
    auto& slot = ideal_[index_of(a)][sign > 0 ? 0 : 1];
    if (slot.size() == 0) slot = generator(a).unitary(sign * M_PI).matrix;
    return slot;
  }

 private:
  EnsembleDims dims_;
  SpectralGenerator free_;
  std::map<double, Matrix> free_steps_;
  std::array<std::unique_ptr<SpectralGenerator>, 3> pulse_gen_;
  std::array<std::array<Matrix, 2>, 3> ideal_;
};

void validate(std::span<const DDSchedule> schedules) {
  for (const auto& s : schedules) {
    if (!(s.tau > 0.0) || !std::isfinite(s.tau)) {
      throw InvalidArgument("pulse spacing tau must be positive, got " + std::to_string(s.tau));
    }
    if (s.pairs < 0) throw InvalidArgument("number of pulse pairs must be non-negative");
  }
}

}  // namespace

DickeState evolve_exact(const DickeState& state, const FieldVector& field,
                        std::span<const DDSchedule> schedules, const std::optional<PulseError>& error,
                        Rng* rng, const PairObserver& observer) {
  validate(schedules);
  if (schedules.empty()) return state;
  const bool noisy = error && error->eta != 0.0;
  if (noisy && rng == nullptr) throw InvalidArgument("noisy evolution needs a random generator");
  if (error && (error->eta < 0.0 || !std::isfinite(error->eta))) {
    throw InvalidArgument("pulse error amplitude eta must be non-negative");
  }

  PulsedPropagator prop(state.dims(), field);
  std::uniform_real_distribution<double> dtheta(noisy ? -error->eta : 0.0, noisy ? error->eta : 0.0);
  const bool per_pulse = noisy && error->correlation == ErrorCorrelation::per_pulse;

  Vector psi = state.amplitudes();
  Vector tmp(psi.size());
  double t = 0.0;
  for (std::size_t si = 0; si < schedules.size(); ++si) {
    const DDSchedule& s = schedules[si];
    const Matrix& u = prop.free_step(s.tau);
    // Second pulse of the pair: the one after the first free interval.
    const int inner_sign = s.mode == PulseMode::alternating ? -1 : +1;
    for (int p = 0; p < s.pairs; ++p) {
      tmp.noalias() = u * psi;
      if (noisy) {
        const double d_inner = dtheta(*rng);
        const double d_outer = per_pulse ? dtheta(*rng) : d_inner;
        psi = prop.generator(s.axis).apply(inner_sign * (M_PI + d_inner), tmp);
        tmp.noalias() = u * psi;
        psi = prop.generator(s.axis).apply(M_PI + d_outer, tmp);
      } else {
        psi.noalias() = prop.ideal_pulse(s.axis, inner_sign) * tmp;
        tmp.noalias() = u * psi;
        psi.noalias() = prop.ideal_pulse(s.axis, +1) * tmp;
      }
      t += 2.0 * s.tau;
      if (observer) observer(si, t, psi);
    }
  }
  return DickeState::normalized(state.dims(), psi);
}

DickeState evolve_effective(const DickeState& state, std::span<const EffectiveSegment> segments) {
  Vector psi = state.amplitudes();
  for (const auto& seg : segments) {
    const double phase = seg.gamma * seg.field * seg.duration;
    if (phase == 0.0) continue;
    psi = SpectralGenerator(collective_operator(state.dims(), seg.axis)).apply(phase, psi);
  }
  return DickeState::normalized(state.dims(), psi);
}

double F1Curve::min_fidelity() const {
  double m = 1.0;
  for (const auto& s : samples) m = std::min(m, s.value);
  return m;
}

double F2Result::min_mean() const {
  double m = 1.0;
  for (const auto& s : samples) m = std::min(m, s.mean);
  return m;
}

std::vector<DDSchedule> xyz_schedules(double axis_time, double tau, PulseMode mode) {
  std::vector<DDSchedule> out;
  for (Axis a : kAxes) out.push_back(DDSchedule::covering(a, axis_time, tau, mode));
  return out;
}

std::vector<TimedValue> f1_trajectory(const DickeState& initial, const FieldVector& field,
                                      std::span<const DDSchedule> schedules) {
  validate(schedules);
  const EnsembleDims dims = initial.dims();
  std::vector<Matrix> eff_step;
  for (const auto& s : schedules) {
    eff_step.push_back(SpectralGenerator(collective_operator(dims, s.axis))
                           .unitary(field.coupling(s.axis) * 2.0 * s.tau)
                           .matrix);
  }
  std::vector<TimedValue> out{{0.0, 1.0}};
  Vector eff = initial.amplitudes();
  evolve_exact(initial, field, schedules, std::nullopt, nullptr,
               [&](std::size_t si, double t, const Vector& psi) {
                 eff = (eff_step[si] * eff).eval();
                 const double f = std::norm(psi.dot(eff)) / (psi.squaredNorm() * eff.squaredNorm());
                 out.push_back({t, std::clamp(f, 0.0, 1.0)});
               });
  return out;
}

std::vector<F1Curve> fidelity_f1(const EnsembleDims& dims, const FieldVector& field,
                                 double total_time, std::span<const double> tau_over_axis_time,
                                 const std::optional<DickeState>& initial) {
  if (!(total_time > 0.0)) throw InvalidArgument("total time must be positive");
  const DickeState start = initial ? *initial : scs_state(dims);
  if (!(start.dims() == dims)) throw DimensionMismatch("fidelity_f1: initial state dimension");
  const double axis_time = total_time / 3.0;
  std::vector<F1Curve> out;
  for (double ratio : tau_over_axis_time) {
    if (!(ratio > 0.0)) throw InvalidArgument("tau/T ratio must be positive");
    const auto schedules = xyz_schedules(axis_time, ratio * axis_time, PulseMode::alternating);
    F1Curve curve;
    curve.tau_over_axis_time = ratio;
    curve.pairs_per_axis = schedules.front().pairs;
    curve.tau = schedules.front().tau;
    curve.samples = f1_trajectory(start, field, schedules);
    out.push_back(std::move(curve));
  }
  return out;
}

F2Result fidelity_f2(const DickeState& initial, const FieldVector& field,
                     std::span<const DDSchedule> schedules, const NoiseModel& noise,
                     unsigned workers) {
  validate(schedules);
  if (noise.trials <= 0) throw InvalidArgument("number of noise trials must be positive");
  if (noise.eta < 0.0 || !std::isfinite(noise.eta)) {
    throw InvalidArgument("pulse error amplitude eta must be non-negative");
  }

  std::vector<double> times{0.0};
  std::vector<Vector> reference{initial.amplitudes()};
  evolve_exact(initial, field, schedules, std::nullopt, nullptr,
               [&](std::size_t, double t, const Vector& psi) {
                 times.push_back(t);
                 reference.push_back(psi);
               });
  const std::size_t n_t = times.size();
  const auto trials = static_cast<std::size_t>(noise.trials);

  std::vector<std::vector<double>> per_trial(trials);
  auto run_trial = [&](std::size_t trial) {
    Rng rng = trial_rng(noise.seed, trial);
    std::vector<double> f(n_t, 1.0);
    if (noise.eta == 0.0) {
      per_trial[trial] = std::move(f);
      return;
    }
    std::size_t k = 1;
    evolve_exact(initial, field, schedules, PulseError{noise.eta, noise.correlation}, &rng,
                 [&](std::size_t, double, const Vector& psi) {
                   f[k] = std::clamp(std::norm(reference[k].dot(psi)), 0.0, 1.0);
                   ++k;
                 });
    per_trial[trial] = std::move(f);
  };

  parallel_for(trials, workers, run_trial);

  F2Result result;
  result.seed = noise.seed;
  result.samples.resize(n_t);
  for (std::size_t k = 0; k < n_t; ++k) {
    double sum = 0.0;
    for (const auto& f : per_trial) sum += f[k];
    const double mean = sum / static_cast<double>(trials);
    double var = 0.0;
    for (const auto& f : per_trial) var += (f[k] - mean) * (f[k] - mean);
    result.samples[k] = {times[k], mean, std::sqrt(var / static_cast<double>(trials))};
  }
  for (const auto& f : per_trial) {
    result.trial_mean.push_back(std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(n_t));
    result.trial_min.push_back(*std::min_element(f.begin(), f.end()));
  }
  return result;
}

}  // namespace vecmag
