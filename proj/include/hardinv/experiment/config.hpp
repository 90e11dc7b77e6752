#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hardinv/baselines/forest.hpp"
#include "hardinv/common/json_io.hpp"
#include "hardinv/data/synth.hpp"
#include "hardinv/rl/td3.hpp"
#include "hardinv/training/trainer.hpp"

namespace hardinv {

// Offsets from the master seed.
inline constexpr std::uint64_t kTeacherSeedOffset = 1;
inline constexpr std::uint64_t kStudentSeedOffset = 2;
inline constexpr std::uint64_t kForestSeedOffset = 3;
inline constexpr std::uint64_t kDirectSeedOffset = 4;
inline constexpr std::uint64_t kTd3SeedOffset = 5;
inline constexpr std::uint64_t kDataSeedOffset = 6;

struct RunConfig {
  std::uint64_t seed = 42;

  SynthConfig synth;
  /// Steel CSV to use instead of the synthetic generator.
  std::string data_path;
  double test_fraction = 0.2;
  /// Fraction of the non-test rows held out for validation.
  double val_fraction = 0.1;

  TrainConfig teacher;
  TrainConfig student;
  TrainConfig direct;
  ForestParams forest;
  Td3Config td3;

  /// Fills every module seed from the master seed.
  void derive_seeds();
  std::uint64_t data_seed() const { return seed + kDataSeedOffset; }
};

/// Defaults with seeds derived from the default master seed.
RunConfig default_run_config();

/// Applies a TOML-style document: `key = value` lines under `[section]`
/// headers, `#` comments, quoted strings, true/false, numbers. Unknown
/// sections or keys and bad values throw ConfigError naming the key.
void apply_config_text(RunConfig& cfg, std::string_view text, std::string_view origin = "config");
void apply_config_file(RunConfig& cfg, const std::string& path);

/// One `section.key=value` assignment (`seed=7` for the top level).
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Every recognized key, as `section.key`.
std::vector<std::string> config_keys();

/// Resolved settings. Thread count is left out since results do not
/// depend on it.
Json config_to_json(const RunConfig& cfg);
/// FNV-1a of the serialized config_to_json document, in hex.
std::string config_digest(const RunConfig& cfg);

}  // namespace hardinv
