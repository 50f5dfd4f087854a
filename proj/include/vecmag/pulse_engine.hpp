#pragma once

// Dynamical-decoupling evolution with instantaneous π pulses.
//
// One pulse pair along axis α over 2τ:
//   alternating: e^{-i(π+dθ)Ĵα} e^{-iĤ_B τ} e^{+i(π+dθ')Ĵα} e^{-iĤ_B τ}
//   identical:   e^{-i(π+dθ)Ĵα} e^{-iĤ_B τ} e^{-i(π+dθ')Ĵα} e^{-iĤ_B τ}
// With rapid pairs only Bα survives, giving e^{-iγBαĴα Tα} with Tα = 2Lτ.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vecmag/spin_core.hpp"

namespace vecmag {

enum class PulseMode { alternating, identical };

/// How rotation-angle errors are shared between the two pulses of a pair.
enum class ErrorCorrelation {
  per_pair,   ///< one dθ reused by both pulses of a pair
  per_pulse,  ///< independent dθ for every pulse
};

std::string_view to_string(PulseMode mode);
PulseMode parse_pulse_mode(std::string_view text);
std::string_view to_string(ErrorCorrelation c);
ErrorCorrelation parse_error_correlation(std::string_view text);

struct DDSchedule {
  Axis axis = Axis::x;
  int pairs = 1;
  double tau = 1e-3;
  PulseMode mode = PulseMode::alternating;

  double duration() const { return 2.0 * pairs * tau; }

  /// Pulse plan covering exactly `duration` with the pulse spacing closest to `tau_target`.
  static DDSchedule covering(Axis axis, double duration, double tau_target,
                             PulseMode mode = PulseMode::alternating);
};

/// dθ ~ U[-eta, eta] for each pulse (or pair).
struct PulseError {
  double eta = 0.0;
  ErrorCorrelation correlation = ErrorCorrelation::per_pair;
};

struct NoiseModel {
  double eta = 0.0;
  int trials = 20;
  std::uint64_t seed = 0;
  ErrorCorrelation correlation = ErrorCorrelation::per_pair;
};

struct EffectiveSegment {
  Axis axis = Axis::x;
  double duration = 0.0;
  double field = 0.0;
  double gamma = 1.0;
};

using Rng = std::mt19937_64;
inline constexpr const char* kRngName = "mt19937_64";

/// Independent per-trial stream derived from (seed, trial index).
Rng trial_rng(std::uint64_t seed, std::uint64_t trial);

/// Called at every pulse-pair boundary with the schedule index, the elapsed time
/// and the current amplitudes.
using PairObserver = std::function<void(std::size_t schedule, double t, const Vector& psi)>;

/// Pulse-by-pulse evolution; schedules are applied in list order.
DickeState evolve_exact(const DickeState& state, const FieldVector& field,
                        std::span<const DDSchedule> schedules,
                        const std::optional<PulseError>& error = std::nullopt, Rng* rng = nullptr,
                        const PairObserver& observer = {});

/// Π e^{-iγBαĴαTα}, first listed segment applied first.
DickeState evolve_effective(const DickeState& state, std::span<const EffectiveSegment> segments);

struct TimedValue {
  double t = 0.0;
  double value = 0.0;
};

struct F1Curve {
  double tau_over_axis_time = 0.0;
  int pairs_per_axis = 0;
  double tau = 0.0;
  std::vector<TimedValue> samples;

  double min_fidelity() const;
};

/// F1(t) = |<Ψ_exact(t)|Ψ_eff(t)>|² at every pair boundary, x-, y- then z-block,
/// each block lasting total_time / 3 with τ = ratio · (total_time / 3).
std::vector<F1Curve> fidelity_f1(const EnsembleDims& dims, const FieldVector& field,
                                 double total_time, std::span<const double> tau_over_axis_time,
                                 const std::optional<DickeState>& initial = std::nullopt);

/// F1 trajectory for arbitrary schedules.
std::vector<TimedValue> f1_trajectory(const DickeState& initial, const FieldVector& field,
                                      std::span<const DDSchedule> schedules);

struct F2Sample {
  double t = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct F2Result {
  std::vector<F2Sample> samples;
  std::vector<double> trial_mean;  ///< time-averaged F2 per trial
  std::vector<double> trial_min;   ///< minimum over t per trial
  std::uint64_t seed = 0;

  double min_mean() const;
};

/// Monte-Carlo F2(t) = |<Ψ_{η=0}(t)|Ψ_η(t)>|² averaged over noise.trials realizations.
/// Trials run on up to `workers` threads; results do not depend on the worker count.
F2Result fidelity_f2(const DickeState& initial, const FieldVector& field,
                     std::span<const DDSchedule> schedules, const NoiseModel& noise,
                     unsigned workers = 1);

/// Three equal blocks (x, y, z) of `axis_time` each at pulse spacing tau.
std::vector<DDSchedule> xyz_schedules(double axis_time, double tau, PulseMode mode);

}  // namespace vecmag
