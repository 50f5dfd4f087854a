#pragma once

// Parallel and sequential interferometers for SCS and GHZ probes.
//
// Every final state is produced by a ChainSpec: a list of unitaries written in
// the order they appear on paper (leftmost acts last) and applied right-to-left.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vecmag/pulse_engine.hpp"
#include "vecmag/spin_core.hpp"

namespace vecmag {

enum class Scheme { parallel, sequential };
enum class Probe { scs, ghz };
enum class Evolution { analytic_effective, exact_pulsed };

std::string_view to_string(Scheme s);
std::string_view to_string(Probe p);
std::string_view to_string(Evolution e);
Scheme parse_scheme(std::string_view text);
Probe parse_probe(std::string_view text);
Evolution parse_evolution(std::string_view text);

struct SchemeConfig {
  Scheme scheme = Scheme::parallel;
  Probe probe = Probe::scs;
  EnsembleDims dims{10};
  FieldVector field{};
  std::array<double, 3> durations{1.0, 1.0, 1.0};
  Evolution evolution = Evolution::analytic_effective;
  double tau = 1e-3;  ///< pulse spacing for exact_pulsed
  PulseMode pulse_mode = PulseMode::alternating;

  double duration(Axis a) const { return durations[index_of(a)]; }
  /// φα = γ Bα Tα.
  double phase(Axis a) const { return field.coupling(a) * duration(a); }
  std::array<double, 3> phases() const { return {phase(Axis::x), phase(Axis::y), phase(Axis::z)}; }
  /// GHZ closed forms only hold for integer J.
  bool analytic_requires_even_n() const { return probe == Probe::ghz; }

  SchemeConfig with_field(const FieldVector& f) const;
  SchemeConfig with_uniform_time(double t) const;
};

enum class StepKind {
  rotation,    ///< e^{-i angle Ĵα}
  twist,       ///< e^{-i angle Ĵα²}
  accumulate,  ///< interrogation block along α (effective or pulsed)
};

struct ChainStep {
  StepKind kind;
  Axis axis;
  double angle = 0.0;

  std::string describe() const;
};

struct ChainSpec {
  std::vector<ChainStep> steps;  ///< printed order, leftmost acts last
  /// Prepared input: rotation applied to the bare probe before the chain (angle 0 = none).
  std::optional<ChainStep> preparation;
  /// Simulated ⟨Ĵz⟩ = sign · closed form.
  int sign = 1;

  std::string describe() const;
};

ChainSpec parallel_chain(Probe probe, Axis axis);
ChainSpec sequential_chain(Probe probe);

DickeState probe_state(const EnsembleDims& dims, Probe probe);

DickeState run_chain(const SchemeConfig& config, const ChainSpec& chain);
DickeState parallel_final_state(const SchemeConfig& config, Axis axis);
DickeState sequential_final_state(const SchemeConfig& config);
/// Final state read out for `axis`: its own interferometer (parallel) or the shared one.
DickeState final_state(const SchemeConfig& config, Axis axis);

/// Global sign relating the simulated chain to the printed ⟨Ĵz⟩ closed form.
int chain_sign(const SchemeConfig& config, Axis axis);

/// Printed ⟨Ĵz⟩ closed form. For the parallel scheme `axis` selects the interferometer.
double analytic_jz(const SchemeConfig& config, Axis axis = Axis::x);
double analytic_jz2(const SchemeConfig& config, Axis axis = Axis::x);
/// Sequential SCS ⟨Ĵz²⟩ with the bracket as printed (differs from the simulation).
double analytic_jz2_printed(const SchemeConfig& config);

/// Sequential-SCS dephasing factor G = [cosφx sinφy cosφz + sinφx sinφz]².
double sequential_g_factor(const SchemeConfig& config);

/// Sines and cosines of the three accumulated phases (of Nφα for GHZ).
struct PhaseTrig {
  double sx, cx, sy, cy, sz, cz;
  static PhaseTrig of(double ax, double ay, double az);
};

/// Sequential-scheme ΔBα·Tα from precomputed trig values; +infinity at blind spots.
/// For GHZ `trig` holds functions of Nφα and n must be even.
double sequential_delta_b_unit(Probe probe, int n, Axis axis, const PhaseTrig& trig);

/// Closed-form ΔBα; +infinity at blind spots.
double analytic_delta_b(const SchemeConfig& config, Axis axis);
/// Sequential SCS ΔBα with the denominators exactly as printed.
double analytic_delta_b_printed(const SchemeConfig& config, Axis axis);

struct AnalyticQfi {
  double main = 0.0;
  double appendix = 0.0;
  bool differ() const { return main != appendix; }
};
AnalyticQfi qfi_analytic(const SchemeConfig& config, Axis axis);

/// Default finite-difference step 1e-5 · max(1, |Bα|).
double default_step(const SchemeConfig& config, Axis axis);

double qfi_numeric(const SchemeConfig& config, Axis axis, std::optional<double> h = std::nullopt);
double delta_b_numeric(const SchemeConfig& config, Axis axis,
                       std::optional<double> h = std::nullopt);

/// True for the +infinity sentinel used by every ΔB routine.
inline bool is_blind_spot(double delta_b) { return !(delta_b < 1e300); }

struct AxisPrecision {
  Axis axis = Axis::x;
  double jz = 0.0;
  double jz2 = 0.0;
  double delta_jz = 0.0;
  std::optional<double> delta_b_analytic;
  double delta_b_numeric = 0.0;
  std::optional<double> qfi_analytic_main;
  std::optional<double> qfi_analytic_appendix;
  double qfi_numeric = 0.0;
  double qcrb = 0.0;
  bool blind_spot = false;
};

struct PrecisionReport {
  SchemeConfig config;
  int trials = 1;
  std::vector<AxisPrecision> axes;
};

/// Aggregates observables, ΔB and QFI for all three axes; throws NumericalError if
/// the numeric ΔB undercuts the Cramér-Rao bound.
PrecisionReport precision_report(const SchemeConfig& config, std::optional<double> h = std::nullopt,
                                 int trials = 1);

nlohmann::json to_json(const SchemeConfig& config);
nlohmann::json to_json(const PrecisionReport& report);

}  // namespace vecmag
