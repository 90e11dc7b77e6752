#include "hardinv/experiment/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "hardinv/baselines/direct_inverse.hpp"
#include "hardinv/common/errors.hpp"
#include "hardinv/data/csv.hpp"
#include "hardinv/data/schema.hpp"
#include "hardinv/data/synth.hpp"
#include "hardinv/nncore/model_io.hpp"

namespace hardinv {

namespace fs = std::filesystem;

namespace {

template <class F>
double timed(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

std::string kind_of(const Json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string()) {
    throw IngestError("artifact has no 'kind' field");
  }
  return doc.at("kind").get<std::string>();
}

}  // namespace

Dataset load_or_synthesize(const RunConfig& cfg) {
  if (!cfg.data_path.empty()) return load_csv(cfg.data_path);
  return synth_generate(cfg.synth);
}

PreparedData prepare_data(const RunConfig& cfg, const Dataset& raw) {
  if (raw.normalized) throw ContractError("prepare_data: expects a raw dataset");
  if (raw.size() < 3) throw IngestError("dataset needs at least 3 rows for train/val/test splits");
  const std::uint64_t seed = mix_seed(cfg.data_seed());
  auto [rest, test] = split(raw, cfg.test_fraction, seed);
  auto [train, val] = split(rest, cfg.val_fraction, mix_seed(seed));
  Scaler scaler = Scaler::fit(train);
  Dataset train_n = scaler.transform(train);
  Dataset val_n = scaler.transform(val);
  return {std::move(train), std::move(val), std::move(test), std::move(scaler), std::move(train_n), std::move(val_n)};
}

Json teacher_to_json(const TeacherArtifact& t) {
  return Json{{"kind", "teacher"},
              {"model", mlp_to_json(t.teacher)},
              {"scaler", t.scaler.to_json()},
              {"curve", curve_to_json(t.curve)},
              {"teacher_digest", t.teacher_digest},
              {"config", t.config},
              {"config_digest", t.config_digest}};
}

TeacherArtifact teacher_from_json(const Json& doc) {
  if (kind_of(doc) != "teacher") throw IngestError("expected a teacher artifact, got '" + kind_of(doc) + "'");
  try {
    TeacherArtifact t{mlp_from_json(doc.at("model")),
                      Scaler::from_json(doc.at("scaler")),
                      curve_from_json(doc.at("curve")),
                      doc.at("teacher_digest").get<std::string>(),
                      doc.value("config_digest", std::string()),
                      doc.value("config", Json::object())};
    if (t.teacher.digest() != t.teacher_digest) throw IngestError("teacher parameters do not match teacher_digest");
    if (t.scaler.feature_count() != t.teacher.input_width()) {
      throw IngestError("teacher input width does not match its scaler");
    }
    t.teacher.freeze();
    return t;
  } catch (const Json::exception& e) {
    throw IngestError(std::string("teacher artifact: ") + e.what());
  }
}

InverseModel InverseArtifact::model() const {
  if (kind == "forest_inverse") {
    if (!forest) throw ContractError("forest artifact without a forest");
    const Forest* f = &*forest;
    return [f](const Matrix& y) { return f->predict(y); };
  }
  if (!net) throw ContractError(kind + " artifact without a network");
  if (kind == "td3_actor") return actor_inverse(*net);
  return mlp_inverse(*net);
}

Json inverse_to_json(const InverseArtifact& a) {
  Json doc{{"kind", a.kind}, {"scaler", a.scaler.to_json()}, {"config_digest", a.config_digest}};
  if (a.kind == "forest_inverse") {
    doc["forest"] = forest_to_json(a.forest.value());
  } else {
    doc["model"] = mlp_to_json(a.net.value());
  }
  return doc;
}

InverseArtifact inverse_from_json(const Json& doc) {
  const std::string kind = kind_of(doc);
  if (kind != "forest_inverse" && kind != "direct_inverse" && kind != "td3_actor") {
    throw IngestError("expected an inverse model artifact, got '" + kind + "'");
  }
  try {
    InverseArtifact a{kind, std::nullopt, std::nullopt, Scaler::from_json(doc.at("scaler")),
                      doc.value("config_digest", std::string())};
    if (kind == "forest_inverse") {
      a.forest = forest_from_json(doc.at("forest"));
      if (a.forest->input_width() != 1 || a.forest->output_width() != a.scaler.feature_count()) {
        throw IngestError("forest widths do not match the scaler");
      }
    } else {
      a.net = mlp_from_json(doc.at("model"));
      if (a.net->input_width() != 1 || a.net->output_width() != a.scaler.feature_count()) {
        throw IngestError(kind + " widths do not match the scaler");
      }
    }
    return a;
  } catch (const Json::exception& e) {
    throw IngestError(kind + " artifact: " + e.what());
  }
}

TeacherRun run_teacher(const RunConfig& cfg, const PreparedData& data) {
  std::optional<FitResult> fit;
  const double wall = timed([&] { fit = train_teacher(data.train, data.val, cfg.teacher); });
  fit->net.freeze();
  const std::string digest = fit->net.digest();
  return {{wall},
          TeacherArtifact{std::move(fit->net), data.scaler, std::move(fit->curve), digest, config_digest(cfg),
                          config_to_json(cfg)}};
}

StudentRun run_student(const RunConfig& cfg, const TeacherArtifact& teacher) {
  std::optional<FitResult> fit;
  const double wall = timed([&] { fit = train_student(teacher.teacher, teacher.scaler, cfg.student); });
  TrainedPair pair{teacher.teacher,    std::move(fit->net),    teacher.scaler,     teacher.curve,
                   std::move(fit->curve), teacher.teacher_digest, config_to_json(cfg), config_digest(cfg)};
  if (!pair.teacher_intact()) throw ContractError("teacher changed during student training");
  return {{wall}, std::move(pair)};
}

DirectRun run_direct_inverse(const RunConfig& cfg, const PreparedData& data) {
  std::optional<FitResult> fit;
  const double wall = timed([&] { fit = train_direct_inverse(data.train, data.val, cfg.direct); });
  return {{wall},
          InverseArtifact{"direct_inverse", std::move(fit->net), std::nullopt, data.scaler, config_digest(cfg)},
          std::move(fit->curve)};
}

ForestRun run_forest(const RunConfig& cfg, const PreparedData& data) {
  std::optional<Forest> forest;
  const double wall = timed([&] { forest = train_forest_inverse(data.train, cfg.forest); });
  return {{wall}, InverseArtifact{"forest_inverse", std::nullopt, std::move(forest), data.scaler, config_digest(cfg)}};
}

Td3Run run_td3(const RunConfig& cfg, const TeacherArtifact& teacher) {
  std::optional<Td3Result> res;
  const double wall = timed([&] { res = td3_train(teacher.teacher, teacher.scaler, cfg.td3); });
  if (teacher.teacher.digest() != teacher.teacher_digest) {
    throw ContractError("teacher changed during td3 training");
  }
  return {{wall},
          InverseArtifact{"td3_actor", std::move(res->actor), std::nullopt, teacher.scaler, config_digest(cfg)},
          std::move(res->curve)};
}

std::vector<ReportEntry> evaluate_inverse(std::string_view name, const InverseModel& model, const Scaler& scaler,
                                          const Dataset& raw_test, const Mlp* teacher, double wall_time_s,
                                          std::uint64_t seed, const std::string& digest) {
  std::vector<ReportEntry> rows;
  if (teacher) {
    rows.push_back({std::string(name), functional_eval(model, *teacher, scaler, raw_test.targets), wall_time_s, seed,
                    digest});
  }
  rows.push_back({std::string(name), input_space_eval(model, scaler, raw_test), wall_time_s, seed, digest});
  return rows;
}

std::string metrics_csv(const std::vector<ReportEntry>& rows) { return ComparisonReport{rows}.to_csv(); }

void require_same_scaler(const Scaler& expected, const Scaler& actual) {
  if (expected == actual) return;
  const auto& a = expected.feature_names();
  const auto& b = actual.feature_names();
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    const std::string na = i < a.size() ? a[i] : "<none>";
    const std::string nb = i < b.size() ? b[i] : "<none>";
    if (na != nb) throw SchemaError("scaler column " + std::to_string(i) + ": expected '" + na + "', got '" + nb + "'");
    if (expected.feature_min()[i] != actual.feature_min()[i] || expected.feature_max()[i] != actual.feature_max()[i]) {
      throw SchemaError("scaler column '" + na + "' has a different fitted range");
    }
  }
  if (expected.target_name() != actual.target_name()) {
    throw SchemaError("scaler target column: expected '" + expected.target_name() + "', got '" +
                      actual.target_name() + "'");
  }
  throw SchemaError("scaler column '" + expected.target_name() + "' has a different fitted range");
}

std::string plot_script(const fs::path& dir) {
  std::vector<std::string> curves;
  std::vector<std::string> rewards;
  if (fs::exists(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.ends_with("_curve.csv")) curves.push_back(name);
      if (name.ends_with("_reward.csv")) rewards.push_back(name);
    }
  }
  std::sort(curves.begin(), curves.end());
  std::sort(rewards.begin(), rewards.end());

  std::string out =
      "# gnuplot script; run from this directory: gnuplot plots.gp\n"
      "set datafile separator ','\n"
      "set key autotitle columnhead\n"
      "set terminal pngcairo size 900,600\n"
      "set grid\n";
  for (const std::string& c : curves) {
    const std::string stem = c.substr(0, c.size() - 4);
    out += "\nset output '" + stem + ".png'\n";
    out += "set title '" + stem + "'\nset xlabel 'epoch'\nset ylabel 'MSE (normalized)'\nset logscale y\n";
    out += "plot '" + c + "' using 1:2 with lines title 'train', '' using 1:3 with lines title 'validation'\n";
    out += "unset logscale y\n";
  }
  for (const std::string& r : rewards) {
    const std::string stem = r.substr(0, r.size() - 4);
    out += "\nset output '" + stem + ".png'\n";
    out += "set title '" + stem + "'\nset xlabel 'step'\nset ylabel 'reward'\n";
    out += "plot '" + r + "' using 1:2 with dots title 'raw', '' using 1:3 with lines lw 2 title 'smoothed'\n";
  }
  return out;
}

ComparisonReport write_report(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IngestError("runs directory '" + dir.string() + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("metrics_") && name.ends_with(".csv")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ReportEntry> entries;
  for (const fs::path& f : files) {
    try {
      for (ReportEntry& e : parse_report_csv(read_text_file(f))) entries.push_back(std::move(e));
    } catch (const IngestError& e) {
      throw IngestError(f.string() + ": " + e.what());
    }
  }
  if (entries.empty()) throw IngestError("no metrics_*.csv files in '" + dir.string() + "'");
  ComparisonReport report = build_report(std::move(entries));
  write_text_file(dir / "report.csv", report.to_csv());
  write_text_file(dir / "report.txt", report.to_table());
  write_text_file(dir / "plots.gp", plot_script(dir));
  return report;
}

PipelineResult run_pipeline(const RunConfig& cfg, const fs::path& out_dir, const Logger& log) {
  const std::string digest = config_digest(cfg);
  fs::create_directories(out_dir);
  write_text_file(out_dir / "config.json", dump_json(config_to_json(cfg)));

  say(log, "data");
  const Dataset raw = load_or_synthesize(cfg);
  save_csv(raw, out_dir / "dataset.csv", digest);
  PreparedData data = prepare_data(cfg, raw);

  say(log, "teacher");
  TeacherRun teacher = run_teacher(cfg, data);
  write_text_file(out_dir / "teacher.json", dump_json(teacher_to_json(teacher.artifact)));
  write_text_file(out_dir / "teacher_curve.csv", teacher.artifact.curve.to_csv(digest));

  say(log, "student");
  StudentRun student = run_student(cfg, teacher.artifact);
  save_pair(student.pair, out_dir / "pair.json");
  write_text_file(out_dir / "student_curve.csv", student.pair.student_curve.to_csv(digest));

  say(log, "direct inverse mlp");
  DirectRun direct = run_direct_inverse(cfg, data);
  write_text_file(out_dir / "direct_mlp.json", dump_json(inverse_to_json(direct.artifact)));
  write_text_file(out_dir / "direct_mlp_curve.csv", direct.curve.to_csv(digest));

  say(log, "random forest");
  ForestRun forest = run_forest(cfg, data);
  write_text_file(out_dir / "random_forest.json", dump_json(inverse_to_json(forest.artifact)));

  say(log, "td3");
  Td3Run td3 = run_td3(cfg, teacher.artifact);
  write_text_file(out_dir / "td3_actor.json", dump_json(inverse_to_json(td3.artifact)));
  write_text_file(out_dir / "td3_reward.csv", td3.curve.to_csv(digest));

  say(log, "evaluation");
  const Mlp* t = &teacher.artifact.teacher;
  const auto write_metrics = [&](std::string_view name, const InverseModel& model, double wall, std::uint64_t seed) {
    const auto rows = evaluate_inverse(name, model, data.scaler, data.raw_test, t, wall, seed, digest);
    write_text_file(out_dir / ("metrics_" + std::string(name) + ".csv"), metrics_csv(rows));
  };
  write_metrics(kStudentName, mlp_inverse(student.pair.student), student.wall_time_s, cfg.student.seed);
  write_metrics(kTd3Name, td3.artifact.model(), td3.wall_time_s, cfg.td3.seed);
  write_metrics(kForestName, forest.artifact.model(), forest.wall_time_s, cfg.forest.seed);
  write_metrics(kDirectName, direct.artifact.model(), direct.wall_time_s, cfg.direct.seed);

  ComparisonReport report = write_report(out_dir);
  return {std::move(report), std::move(teacher), std::move(student), std::move(direct),
          std::move(forest), std::move(td3),     std::move(data)};
}

}  // namespace hardinv
