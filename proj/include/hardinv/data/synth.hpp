#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "hardinv/data/dataset.hpp"
#include "hardinv/data/schema.hpp"

namespace hardinv {

inline constexpr std::size_t kElementCount = kFeatureCount - kFirstElementColumn;

struct ElementRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Default sampling ranges (wt%) for C, Mn, P, S, Si, Ni, Cr, Mo, V, Al, Cu.
inline constexpr std::array<ElementRange, kElementCount> kDefaultElementRanges = {{
    {0.10, 0.60}, {0.30, 1.50}, {0.005, 0.040}, {0.005, 0.040}, {0.10, 0.50}, {0.0, 2.0},
    {0.0, 1.5},   {0.0, 0.5},   {0.0, 0.2},     {0.0, 0.05},    {0.0, 0.5},
}};

/// Hardness change (HRC) per wt% above the range midpoint, same element order.
inline constexpr std::array<double, kElementCount> kElementCoefficients = {
    20.0, 3.0, 40.0, -20.0, 2.0, 1.0, 2.0, 6.0, 10.0, -10.0, 1.0};

inline constexpr double kSynthTempMin = 200.0;  // deg C
inline constexpr double kSynthTempMax = 700.0;
inline constexpr double kSynthLog10TimeMin = 3.0;  // seconds
inline constexpr double kSynthLog10TimeMax = 5.0;
inline constexpr double kSynthHardnessFloor = 20.0;
inline constexpr double kSynthHardnessCeiling = 65.0;

struct SynthConfig {
  std::size_t n_samples = 5000;
  std::uint64_t seed = 0;
  double noise_std = 0.5;  // HRC
  std::array<ElementRange, kElementCount> element_ranges = kDefaultElementRanges;
  /// Rows per drawn setting. Rows of one setting share the composition and
  /// the tempering parameter exactly but use different (T, t).
  std::size_t iso_variants = 1;
};

/// Hollomon-Jaffe style tempering parameter (T + 273.15)(20 + log10 t) / 1000.
double tempering_parameter(double temp_c, double time_s);

/// Parameter range spanned by the sampling box of (T, t).
double tempering_parameter_min();
double tempering_parameter_max();

/// Noiseless generator hardness, a function of (P, composition) only.
double synth_hardness(double parameter, std::span<const double> composition, const SynthConfig& cfg);
/// Same, from a full 13-column raw feature row.
double synth_hardness_of_row(std::span<const double> row, const SynthConfig& cfg);

/// T uniform in [200, 700] C, t log-uniform in [1e3, 1e5] s, each element
/// uniform in its range; hardness from synth_hardness plus N(0, noise_std),
/// clamped to [20, 65].
Dataset synth_generate(const SynthConfig& cfg);

struct ConditionalVarianceFloor {
  std::array<double, kFeatureCount> per_feature{};
  double mean = 0.0;  // average over the 13 features
};

/// Monte Carlo estimate of E[Var(X | hardness)] in raw feature units under
/// the noiseless generator: rows are sorted by hardness, exact hardness ties
/// (the clamp plateaus) form their own groups, the rest are cut into
/// consecutive groups of `group_size`, and within-group variances are
/// averaged with group-size weights.
ConditionalVarianceFloor conditional_variance_floor(const SynthConfig& cfg, std::size_t n_samples,
                                                    std::size_t group_size);

}  // namespace hardinv
