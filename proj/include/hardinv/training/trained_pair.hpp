#pragma once

#include <filesystem>
#include <string>

#include "hardinv/common/json_io.hpp"
#include "hardinv/data/scaler.hpp"
#include "hardinv/nncore/mlp.hpp"
#include "hardinv/training/trainer.hpp"

namespace hardinv {

/// A frozen teacher with the student trained against it.
struct TrainedPair {
  Mlp teacher;
  Mlp student;
  Scaler scaler;
  LossCurve teacher_curve;
  LossCurve student_curve;
  /// Teacher digest recorded when it was frozen.
  std::string teacher_digest;
  Json config = Json::object();
  std::string config_digest;

  /// The teacher still matches the digest taken at freeze time.
  bool teacher_intact() const { return teacher.digest() == teacher_digest; }
};

Json curve_to_json(const LossCurve& curve);
LossCurve curve_from_json(const Json& doc);

Json pair_to_json(const TrainedPair& pair);
/// Loads and re-checks the teacher digest; the teacher comes back frozen.
TrainedPair pair_from_json(const Json& doc);

void save_pair(const TrainedPair& pair, const std::filesystem::path& path);
TrainedPair load_pair(const std::filesystem::path& path);

}  // namespace hardinv
