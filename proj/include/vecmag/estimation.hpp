#pragma once

// Field recovery from ⟨Ĵz⟩(T) traces of the sequential interferometer and
// precision-scaling fits.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vecmag/schemes.hpp"

namespace vecmag {

/// Uniformly sampled ⟨Ĵz⟩ with T_k = t0 + k·dt and Tx = Ty = Tz = T_k.
struct SignalTrace {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  std::vector<double> times() const;

  /// Builds a trace from explicit (T, value) pairs; rejects non-uniform grids.
  static SignalTrace from_samples(const std::vector<double>& times, std::vector<double> values);
};

enum class TraceSource { analytic, simulated };

/// Samples M points on [0, t_max). The analytic source multiplies the closed
/// form by chain_sign so both sources agree. `axis` picks the parallel interferometer.
SignalTrace sample_signal(const SchemeConfig& config, double t_max, int m,
                          TraceSource source = TraceSource::analytic, Axis axis = Axis::x,
                          unsigned workers = 1);

struct Spectrum {
  double bin_width = 0.0;  ///< Δω = 2π / (M·dt)
  std::vector<double> omega;
  std::vector<double> magnitude;  ///< one-sided: a·sin(ωT) on a bin reads a
};

Spectrum fft_spectrum(const SignalTrace& trace);

struct SpectrumPeak {
  double omega = 0.0;
  double amplitude = 0.0;
};

struct PeakOptions {
  int count = 6;
  double min_separation_bins = 3.0;
  /// Peaks below this fraction of the largest peak are treated as leakage.
  double relative_floor = 0.2;
};

/// Strongest local maxima (DC excluded), refined by a parabola through the
/// log-magnitudes of the neighbouring bins. Sorted by descending amplitude.
std::vector<SpectrumPeak> extract_peaks(const Spectrum& spectrum, const PeakOptions& options = {});

enum class RecoveryMethod { amplitude_rule, paper_rule };
std::string_view to_string(RecoveryMethod m);
RecoveryMethod parse_recovery_method(std::string_view text);

struct RecoveredField {
  double bx = 0.0;
  double by = 0.0;
  double bz = 0.0;
  RecoveryMethod method = RecoveryMethod::amplitude_rule;
  double residual = 0.0;
  double scale = 1.0;
  /// Re-synthesized six frequencies match the input peaks within tolerance.
  bool consistent = true;
  /// Largest mismatch between re-synthesized and observed frequencies (rad per unit T).
  double frequency_mismatch = 0.0;
  bool signs_resolved = false;
  /// Relative residuals for (+By,+Bz), (+By,-Bz), (-By,+Bz), (-By,-Bz).
  std::array<double, 4> sign_residuals{};

  FieldVector field() const { return {bx, by, bz, 1.0}; }
};

/// The six frequencies s·(Bx±By±Bz), s·(Bx±Bz), in that order.
std::array<double, 6> six_frequencies(double bx, double by, double bz, double scale);

/// Unsigned |By|, |Bz| and Bx from six peaks. Throws OutOfRegime when any
/// reconstructed frequency is non-positive (needs Bx > |By| + |Bz|).
RecoveredField recover_field(const std::vector<SpectrumPeak>& peaks, double scale,
                             RecoveryMethod method = RecoveryMethod::amplitude_rule,
                             double tolerance = 1e-6);

/// Fits the four sign assignments of (By, Bz) to the trace using the closed-form
/// ⟨Ĵz⟩ of `model` (scheme, probe, N) and keeps the best after Levenberg-Marquardt
/// refinement of all three components.
RecoveredField resolve_signs(const RecoveredField& candidate, const SignalTrace& trace,
                             const SchemeConfig& model);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares line through (ln N, ln ΔB).
ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points);

enum class Minimization {
  joint,         ///< all three components vary over (0, π)
  fixed_others,  ///< only Bα varies; the others stay at 1
};
std::string_view to_string(Minimization m);
Minimization parse_minimization(std::string_view text);

struct DeltaBMinimum {
  double delta_b = 0.0;
  FieldVector argmin{};
};

/// Minimum of the sequential closed-form ΔBα at Tα = 1 over B in (0, π):
/// grid search followed by a compass-search polish.
DeltaBMinimum minimize_delta_b(Probe probe, int n, Axis axis,
                               Minimization mode = Minimization::joint, int grid_points = 96);

nlohmann::json to_json(const RecoveredField& field);
nlohmann::json to_json(const SpectrumPeak& peak);

}  // namespace vecmag
