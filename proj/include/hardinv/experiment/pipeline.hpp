#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hardinv/baselines/forest.hpp"
#include "hardinv/data/dataset.hpp"
#include "hardinv/data/scaler.hpp"
#include "hardinv/eval/protocols.hpp"
#include "hardinv/eval/report.hpp"
#include "hardinv/experiment/config.hpp"
#include "hardinv/rl/td3.hpp"
#include "hardinv/training/trained_pair.hpp"

namespace hardinv {

// Model names used in reports and metrics file names.
inline constexpr std::string_view kStudentName = "teacher_student";
inline constexpr std::string_view kTd3Name = "td3";
inline constexpr std::string_view kForestName = "random_forest";
inline constexpr std::string_view kDirectName = "direct_mlp";

using Logger = std::function<void(const std::string&)>;

/// Raw splits plus the scaler fitted on the raw training rows.
struct PreparedData {
  Dataset raw_train;
  Dataset raw_val;
  Dataset raw_test;
  Scaler scaler;
  Dataset train;  // normalized
  Dataset val;    // normalized
};

/// The CSV at data_path, or the synthetic benchmark when it is empty.
Dataset load_or_synthesize(const RunConfig& cfg);
/// Test split first (seed mix_seed(data seed)), then validation from the rest.
PreparedData prepare_data(const RunConfig& cfg, const Dataset& raw);

struct TeacherArtifact {
  Mlp teacher;  // frozen
  Scaler scaler;
  LossCurve curve;
  std::string teacher_digest;
  std::string config_digest;
  Json config = Json::object();
};

Json teacher_to_json(const TeacherArtifact& t);
TeacherArtifact teacher_from_json(const Json& doc);

/// Model file for the direct inverse MLP, the TD3 actor, or the forest.
struct InverseArtifact {
  std::string kind;  // "direct_inverse", "td3_actor" or "forest_inverse"
  std::optional<Mlp> net;
  std::optional<Forest> forest;
  Scaler scaler;
  std::string config_digest;

  InverseModel model() const;
};

Json inverse_to_json(const InverseArtifact& a);
InverseArtifact inverse_from_json(const Json& doc);

struct Timed {
  double wall_time_s = 0.0;
};

struct TeacherRun : Timed {
  TeacherArtifact artifact;
};
struct StudentRun : Timed {
  TrainedPair pair;
};
struct DirectRun : Timed {
  InverseArtifact artifact;
  LossCurve curve;
};
struct ForestRun : Timed {
  InverseArtifact artifact;
};
struct Td3Run : Timed {
  InverseArtifact artifact;
  RewardCurve curve;
};

TeacherRun run_teacher(const RunConfig& cfg, const PreparedData& data);
StudentRun run_student(const RunConfig& cfg, const TeacherArtifact& teacher);
DirectRun run_direct_inverse(const RunConfig& cfg, const PreparedData& data);
ForestRun run_forest(const RunConfig& cfg, const PreparedData& data);
Td3Run run_td3(const RunConfig& cfg, const TeacherArtifact& teacher);

/// Input-space metrics on the raw test rows; functional metrics on the test
/// targets when a teacher is given.
std::vector<ReportEntry> evaluate_inverse(std::string_view name, const InverseModel& model, const Scaler& scaler,
                                          const Dataset& raw_test, const Mlp* teacher, double wall_time_s,
                                          std::uint64_t seed, const std::string& config_digest);

/// Rows of the report CSV format.
std::string metrics_csv(const std::vector<ReportEntry>& rows);

/// Throws SchemaError naming the first column where the two scalers differ.
void require_same_scaler(const Scaler& expected, const Scaler& actual);

/// gnuplot script for the curve files present in `dir`.
std::string plot_script(const std::filesystem::path& dir);

/// Gathers every metrics_*.csv in `dir` and writes report.csv, report.txt
/// and plots.gp there.
ComparisonReport write_report(const std::filesystem::path& dir);

struct PipelineResult {
  ComparisonReport report;
  TeacherRun teacher;
  StudentRun student;
  DirectRun direct;
  ForestRun forest;
  Td3Run td3;
  PreparedData data;
};

/// Data, teacher, student, both baselines, TD3, evaluation and report, all
/// written under `out_dir`.
PipelineResult run_pipeline(const RunConfig& cfg, const std::filesystem::path& out_dir, const Logger& log = {});

}  // namespace hardinv
