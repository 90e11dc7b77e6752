#include "hardinv/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hardinv/common/errors.hpp"
#include "hardinv/common/rng.hpp"

namespace hardinv {

namespace {

void validate(const SynthConfig& cfg) {
  if (cfg.n_samples < 1) throw ContractError("synth: n_samples must be >= 1");
  if (!(cfg.noise_std >= 0.0) || !std::isfinite(cfg.noise_std)) {
    throw ContractError("synth: noise_std must be finite and >= 0");
  }
  if (cfg.iso_variants < 1) throw ContractError("synth: iso_variants must be >= 1");
  for (const ElementRange& r : cfg.element_ranges) {
    if (!(r.lo >= 0.0 && r.hi >= r.lo)) throw ContractError("synth: element range must satisfy 0 <= lo <= hi");
  }
}

// Finds (T', t') in the sampling box, different from (temp, time), whose
// tempering parameter is bit-identical to `parameter`.
bool iso_partner(double parameter, double temp, double time, Rng& rng, double& out_temp, double& out_time) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double t2 = rng.uniform(kSynthTempMin, kSynthTempMax);
    double time2 = std::pow(10.0, 1000.0 * parameter / (t2 + 273.15) - 20.0);
    if (!(time2 >= std::pow(10.0, kSynthLog10TimeMin) && time2 <= std::pow(10.0, kSynthLog10TimeMax))) continue;
    for (int nudge = 0; nudge < 64; ++nudge) {
      const double p2 = tempering_parameter(t2, time2);
      if (p2 == parameter) {
        if (t2 == temp && time2 == time) break;
        out_temp = t2;
        out_time = time2;
        return true;
      }
      time2 = std::nextafter(time2, p2 < parameter ? INFINITY : 0.0);
    }
  }
  return false;
}

}  // namespace

double tempering_parameter(double temp_c, double time_s) {
  return (temp_c + 273.15) * (20.0 + std::log10(time_s)) / 1000.0;
}

double tempering_parameter_min() { return tempering_parameter(kSynthTempMin, std::pow(10.0, kSynthLog10TimeMin)); }
double tempering_parameter_max() { return tempering_parameter(kSynthTempMax, std::pow(10.0, kSynthLog10TimeMax)); }

double synth_hardness(double parameter, std::span<const double> composition, const SynthConfig& cfg) {
  if (composition.size() != kElementCount) throw DimensionError("synth_hardness: expected 11 elements");
  const double p_min = tempering_parameter_min();
  const double p_max = tempering_parameter_max();
  double h = 65.0 - 28.0 * (parameter - p_min) / (p_max - p_min);
  for (std::size_t e = 0; e < kElementCount; ++e) {
    const double mid = 0.5 * (cfg.element_ranges[e].lo + cfg.element_ranges[e].hi);
    h += kElementCoefficients[e] * (composition[e] - mid);
  }
  return h;
}

double synth_hardness_of_row(std::span<const double> row, const SynthConfig& cfg) {
  if (row.size() != kFeatureCount) throw DimensionError("synth_hardness_of_row: expected 13 columns");
  const double p = tempering_parameter(row[kTemperatureColumn], row[kTimeColumn]);
  return std::clamp(synth_hardness(p, row.subspan(kFirstElementColumn), cfg), kSynthHardnessFloor,
                    kSynthHardnessCeiling);
}

Dataset synth_generate(const SynthConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  Matrix features(cfg.n_samples, kFeatureCount);
  std::vector<double> targets(cfg.n_samples);
  std::size_t row = 0;
  while (row < cfg.n_samples) {
    std::array<double, kFeatureCount> base{};
    base[kTemperatureColumn] = rng.uniform(kSynthTempMin, kSynthTempMax);
    base[kTimeColumn] = std::pow(10.0, rng.uniform(kSynthLog10TimeMin, kSynthLog10TimeMax));
    for (std::size_t e = 0; e < kElementCount; ++e) {
      base[kFirstElementColumn + e] = rng.uniform(cfg.element_ranges[e].lo, cfg.element_ranges[e].hi);
    }
    const double p = tempering_parameter(base[kTemperatureColumn], base[kTimeColumn]);

    std::vector<std::array<double, kFeatureCount>> group{base};
    for (std::size_t v = 1; v < cfg.iso_variants; ++v) {
      double temp = 0.0;
      double time = 0.0;
      if (!iso_partner(p, base[kTemperatureColumn], base[kTimeColumn], rng, temp, time)) break;
      auto variant = base;
      variant[kTemperatureColumn] = temp;
      variant[kTimeColumn] = time;
      group.push_back(variant);
    }
    // Settings near the corners of the box may have no partner; redraw them.
    if (group.size() < cfg.iso_variants) continue;

    const double clean = synth_hardness(p, std::span<const double>(base).subspan(kFirstElementColumn), cfg);
    for (const auto& r : group) {
      if (row == cfg.n_samples) break;
      std::copy(r.begin(), r.end(), features.row(row).begin());
      const double noise = cfg.noise_std > 0.0 ? rng.normal(0.0, cfg.noise_std) : 0.0;
      targets[row] = std::clamp(clean + noise, kSynthHardnessFloor, kSynthHardnessCeiling);
      ++row;
    }
  }
  return Dataset{std::move(features), std::move(targets), false};
}

ConditionalVarianceFloor conditional_variance_floor(const SynthConfig& cfg, std::size_t n_samples,
                                                    std::size_t group_size) {
  if (group_size < 2) throw ContractError("conditional_variance_floor: group_size must be >= 2");
  SynthConfig clean = cfg;
  clean.noise_std = 0.0;
  clean.iso_variants = 1;
  clean.n_samples = n_samples;
  const Dataset ds = synth_generate(clean);

  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ds.targets[a] < ds.targets[b]; });

  // Runs of equal hardness (the clamp plateaus) are groups of their own; the
  // remaining rows are cut into consecutive chunks of at most group_size.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t chunk_begin = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && ds.targets[order[j]] == ds.targets[order[i]]) ++j;
    if (j - i >= 2) {
      if (chunk_begin < i) groups.emplace_back(chunk_begin, i);
      groups.emplace_back(i, j);
      chunk_begin = j;
    } else if (j - chunk_begin == group_size) {
      groups.emplace_back(chunk_begin, j);
      chunk_begin = j;
    }
    i = j;
  }
  if (chunk_begin < order.size()) groups.emplace_back(chunk_begin, order.size());

  ConditionalVarianceFloor floor;
  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    double weighted = 0.0;
    for (const auto& [a, b] : groups) {
      if (b - a < 2) continue;
      double mean = 0.0;
      for (std::size_t k = a; k < b; ++k) mean += ds.features(order[k], c);
      mean /= static_cast<double>(b - a);
      double ss = 0.0;
      for (std::size_t k = a; k < b; ++k) {
        const double d = ds.features(order[k], c) - mean;
        ss += d * d;
      }
      weighted += ss;
    }
    floor.per_feature[c] = weighted / static_cast<double>(ds.size());
  }
  floor.mean = std::accumulate(floor.per_feature.begin(), floor.per_feature.end(), 0.0) /
               static_cast<double>(kFeatureCount);
  return floor;
}

}  // namespace hardinv
