#include <doctest.h>

#include <filesystem>
#include <set>

#include "hardinv/common/errors.hpp"
#include "hardinv/experiment/config.hpp"
#include "hardinv/experiment/pipeline.hpp"

using namespace hardinv;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text) {
  RunConfig cfg = default_run_config();
  try {
    apply_config_text(cfg, text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

RunConfig tiny_config() {
  RunConfig cfg = default_run_config();
  apply_config_text(cfg, R"(
seed = 11
[data]
n_samples = 300
[teacher]
epochs = 5
[student]
epochs = 3
steps_per_epoch = 10
[direct_inverse]
epochs = 5
[forest]
n_trees = 3
[td3]
total_steps = 300
warmup_steps = 100
batch = 32
actor_hidden = 8
critic_hidden = 8
)");
  return cfg;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hardinv_experiment_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("defaults and seed offsets") {
  const RunConfig cfg = default_run_config();
  CHECK(cfg.seed == 42);
  CHECK(cfg.teacher.seed == 43);
  CHECK(cfg.student.seed == 44);
  CHECK(cfg.forest.seed == 45);
  CHECK(cfg.direct.seed == 46);
  CHECK(cfg.td3.seed == 47);
  CHECK(cfg.synth.seed == 48);
  CHECK(cfg.teacher.epochs == 500);
  CHECK(cfg.student.epochs * cfg.student.steps_per_epoch == 15000);
  CHECK(cfg.direct.epochs == 1000);
  CHECK(cfg.td3.total_steps == 40000);
  CHECK(cfg.forest.n_trees == 100);
}

TEST_CASE("config text") {
  RunConfig cfg = default_run_config();
  apply_config_text(cfg, R"(
# comment
seed = 7   # trailing comment
[data]
path = "steel.csv"
noise_std = 0.25
[forest]
bootstrap = false
[td3]
total_steps = 1_000
tau = 0.01
)");
  CHECK(cfg.seed == 7);
  CHECK(cfg.teacher.seed == 8);
  CHECK(cfg.data_path == "steel.csv");
  CHECK(cfg.synth.noise_std == 0.25);
  CHECK_FALSE(cfg.forest.bootstrap);
  CHECK(cfg.td3.total_steps == 1000);
  CHECK(cfg.td3.tau == 0.01);
}

TEST_CASE("config errors name the key") {
  CHECK(config_error("[teacher]\nepoch = 3\n").find("teacher.epoch") != std::string::npos);
  CHECK(config_error("[teachers]\n").find("teachers") != std::string::npos);
  CHECK(config_error("[teacher]\nlr = fast\n").find("teacher.lr") != std::string::npos);
  CHECK(config_error("[teacher]\nbatch_size = 0\n").find("teacher.batch_size") != std::string::npos);
  CHECK(config_error("[td3]\ntau = 2\n").find("td3.tau") != std::string::npos);
  CHECK(config_error("[data]\npath = unquoted\n").find("data.path") != std::string::npos);
  CHECK(config_error("seed\n").find(":1") != std::string::npos);
  CHECK(config_error("[forest]\nbootstrap = yes\n").find("forest.bootstrap") != std::string::npos);
}

TEST_CASE("overrides") {
  RunConfig cfg = default_run_config();
  apply_override(cfg, "teacher.epochs=12");
  apply_override(cfg, "seed=100");
  apply_override(cfg, "data.path=some/file.csv");
  CHECK(cfg.teacher.epochs == 12);
  CHECK(cfg.teacher.seed == 101);
  CHECK(cfg.data_path == "some/file.csv");
  CHECK_THROWS_AS(apply_override(cfg, "nonsense"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "student.size=3"), ConfigError);
}

TEST_CASE("config digest") {
  RunConfig a = default_run_config();
  RunConfig b = default_run_config();
  CHECK(config_digest(a) == config_digest(b));
  b.forest.threads = 4;
  CHECK(config_digest(a) == config_digest(b));
  b.teacher.lr = 2e-3;
  CHECK(config_digest(a) != config_digest(b));
  CHECK(config_digest(a).size() == 16);
  CHECK(config_keys().size() > 30);
}

TEST_CASE("data preparation") {
  RunConfig cfg = default_run_config();
  cfg.synth.n_samples = 1000;
  const PreparedData d = prepare_data(cfg, load_or_synthesize(cfg));
  CHECK(d.raw_test.size() == 200);
  CHECK(d.raw_val.size() == 80);
  CHECK(d.raw_train.size() == 720);
  CHECK(d.train.normalized);
  CHECK(d.scaler == Scaler::fit(d.raw_train));
}

TEST_CASE("scaler comparison names the column") {
  RunConfig cfg = default_run_config();
  cfg.synth.n_samples = 100;
  const Scaler a = prepare_data(cfg, load_or_synthesize(cfg)).scaler;
  CHECK_NOTHROW(require_same_scaler(a, a));
  Json j = a.to_json();
  j["columns"][8] = "Chromium";
  try {
    require_same_scaler(a, Scaler::from_json(j));
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("Chromium") != std::string::npos);
  }
}

TEST_CASE("tiny pipeline: four models, artifacts, determinism") {
  const RunConfig cfg = tiny_config();
  const fs::path a = scratch("a");
  const fs::path b = scratch("b");
  const PipelineResult ra = run_pipeline(cfg, a);
  run_pipeline(cfg, b);

  std::set<std::string> models;
  for (const ReportEntry& e : ra.report.rows) models.insert(e.model);
  CHECK(models.size() == 4);
  CHECK(ra.report.rows.size() == 8);
  CHECK(ra.report.rows.front().metrics.protocol == Protocol::functional);
  CHECK(ra.teacher.artifact.teacher.digest() == ra.teacher.artifact.teacher_digest);

  for (const char* name : {"dataset.csv", "teacher.json", "teacher_curve.csv", "pair.json", "student_curve.csv",
                           "direct_mlp.json", "direct_mlp_curve.csv", "random_forest.json", "td3_actor.json",
                           "td3_reward.csv", "config.json", "plots.gp"}) {
    INFO(name);
    REQUIRE(fs::exists(a / name));
    CHECK(read_text_file(a / name) == read_text_file(b / name));
  }
  const std::string digest = config_digest(cfg);
  CHECK(read_text_file(a / "dataset.csv").starts_with("# config_digest=" + digest));
  CHECK(read_json_file(a / "teacher.json").at("config_digest") == digest);
  CHECK(read_json_file(a / "pair.json").at("config_digest") == digest);

  // Artifacts load back.
  const TeacherArtifact t = teacher_from_json(read_json_file(a / "teacher.json"));
  CHECK(t.teacher.frozen());
  CHECK(t.teacher == ra.teacher.artifact.teacher);
  const InverseArtifact f = inverse_from_json(read_json_file(a / "random_forest.json"));
  CHECK(f.forest->trees() == ra.forest.artifact.forest->trees());
  const InverseArtifact actor = inverse_from_json(read_json_file(a / "td3_actor.json"));
  CHECK(*actor.net == *ra.td3.artifact.net);
  CHECK_THROWS_AS(inverse_from_json(read_json_file(a / "teacher.json")), IngestError);

  fs::remove_all(a);
  fs::remove_all(b);
}
