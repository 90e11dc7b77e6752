// Command-line driver: dataset synthesis, training of the four inverse
// models, evaluation and reporting.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hardinv/common/errors.hpp"
#include "hardinv/data/csv.hpp"
#include "hardinv/experiment/config.hpp"
#include "hardinv/experiment/pipeline.hpp"
#include "hardinv/nncore/model_io.hpp"

namespace fs = std::filesystem;
using namespace hardinv;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> set;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string data;
};

void add_common(CLI::App* cmd, Common& c, bool with_data) {
  cmd->add_option("--config", c.config, "TOML-style run configuration");
  cmd->add_option("--set", c.set, "Override one key, e.g. --set teacher.epochs=50 (repeatable)");
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--threads", c.threads, "Worker threads for forest fitting");
  if (with_data) cmd->add_option("--data", c.data, "Steel CSV (default: data.path, else the synthetic benchmark)");
}

// Precedence: defaults < config file < --set < dedicated flags.
RunConfig resolve(const Common& c) {
  RunConfig cfg = default_run_config();
  if (!c.config.empty()) apply_config_file(cfg, c.config);
  for (const std::string& s : c.set) apply_override(cfg, s);
  if (c.seed) cfg.seed = *c.seed;
  if (c.threads) cfg.forest.threads = *c.threads;
  if (!c.data.empty()) cfg.data_path = c.data;
  cfg.derive_seeds();
  return cfg;
}

void log_line(const std::string& msg) { std::cerr << "[hardinv] " << msg << "\n"; }

fs::path dir_of(const std::string& out) {
  const fs::path p = fs::path(out).parent_path();
  return p.empty() ? fs::path(".") : p;
}

void write_metrics(const fs::path& dir, std::string_view name, const std::vector<ReportEntry>& rows) {
  const fs::path path = dir / ("metrics_" + std::string(name) + ".csv");
  write_text_file(path, metrics_csv(rows));
  log_line("wrote " + path.string());
}

std::string metric_set_csv(std::string_view model, const std::vector<MetricSet>& sets, const std::string& digest) {
  std::string out = "# config_digest=" + digest + "\nmodel,protocol,split,n,mse,mae,r2\n";
  for (const MetricSet& m : sets) {
    out += std::string(model) + "," + std::string(to_string(m.protocol)) + "," + std::string(to_string(m.split)) +
           "," + std::to_string(m.n) + "," + format_double(m.mse) + "," + format_double(m.mae) + "," +
           (m.r2 ? format_double(*m.r2) : "") + "\n";
  }
  return out;
}

std::string_view model_name(const std::string& kind) {
  if (kind == "forest_inverse") return kForestName;
  if (kind == "td3_actor") return kTd3Name;
  return kDirectName;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse design of steel tempering: teacher-student training and baselines"};
  app.require_subcommand(1);

  Common synth_c;
  std::optional<std::size_t> synth_n;
  std::optional<double> synth_noise;
  std::optional<std::size_t> synth_iso;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write the synthetic benchmark as CSV");
  add_common(synth, synth_c, false);
  synth->add_option("--n", synth_n, "Number of rows");
  synth->add_option("--noise-std", synth_noise, "Hardness noise (HRC)");
  synth->add_option("--iso-variants", synth_iso, "Rows per (tempering parameter, composition) setting");
  synth->add_option("--out", synth_out, "Output CSV")->required();

  Common teacher_c;
  std::string teacher_out;
  auto* teacher = app.add_subcommand("train-teacher", "Train the forward surrogate");
  add_common(teacher, teacher_c, true);
  teacher->add_option("--out", teacher_out, "Teacher JSON")->required();

  Common student_c;
  std::string student_teacher;
  std::string student_out;
  auto* student = app.add_subcommand("train-student", "Train the inverse student through a frozen teacher");
  add_common(student, student_c, true);
  student->add_option("--teacher", student_teacher, "Teacher JSON")->required()->check(CLI::ExistingFile);
  student->add_option("--out", student_out, "Trained pair JSON")->required();

  Common rf_c;
  std::string rf_teacher;
  std::string rf_out;
  auto* rf = app.add_subcommand("baseline-rf", "Fit the regression forest inverse baseline");
  add_common(rf, rf_c, true);
  rf->add_option("--teacher", rf_teacher, "Teacher JSON, enables functional metrics")->check(CLI::ExistingFile);
  rf->add_option("--out", rf_out, "Forest JSON")->required();

  Common mlp_c;
  std::string mlp_teacher;
  std::string mlp_out;
  auto* mlp = app.add_subcommand("baseline-mlp", "Train the direct inverse MLP baseline");
  add_common(mlp, mlp_c, true);
  mlp->add_option("--teacher", mlp_teacher, "Teacher JSON, enables functional metrics")->check(CLI::ExistingFile);
  mlp->add_option("--out", mlp_out, "Model JSON")->required();

  Common td3_c;
  std::string td3_teacher;
  std::string td3_out;
  auto* td3 = app.add_subcommand("train-td3", "Train the TD3 agent against a frozen teacher");
  add_common(td3, td3_c, true);
  td3->add_option("--teacher", td3_teacher, "Teacher JSON")->required()->check(CLI::ExistingFile);
  td3->add_option("--out", td3_out, "Actor JSON")->required();

  Common eval_c;
  std::string eval_pair;
  std::string eval_model;
  std::string eval_protocol = "both";
  std::string eval_split = "test";
  std::string eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "Score an inverse model on a dataset");
  add_common(evaluate, eval_c, true);
  evaluate->add_option("--pair", eval_pair, "Trained pair JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--model", eval_model, "Other inverse model JSON to score with the pair's teacher")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--protocol", eval_protocol, "functional, input-space or both")
      ->check(CLI::IsMember({"functional", "input-space", "both"}));
  evaluate->add_option("--split", eval_split, "train or test")->check(CLI::IsMember({"train", "test"}));
  evaluate->add_option("--out", eval_out, "Metrics CSV (default: stdout)");

  std::string report_runs;
  auto* report = app.add_subcommand("report", "Build the comparison report from metrics_*.csv files");
  report->add_option("--runs", report_runs, "Run directory")->required();

  Common run_c;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Full pipeline: data, all models, evaluation, report");
  add_common(run, run_c, true);
  run->add_option("--out", run_out, "Output directory")->required();

  Common cfg_c;
  auto* show = app.add_subcommand("config", "Print the resolved configuration and its digest");
  add_common(show, cfg_c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) {
      RunConfig cfg = resolve(synth_c);
      if (synth_n) cfg.synth.n_samples = *synth_n;
      if (synth_noise) cfg.synth.noise_std = *synth_noise;
      if (synth_iso) cfg.synth.iso_variants = *synth_iso;
      if (cfg.synth.n_samples == 0) throw ConfigError("--n must be positive");
      if (!(cfg.synth.noise_std >= 0.0)) throw ConfigError("--noise-std must be non-negative");
      if (cfg.synth.iso_variants == 0) throw ConfigError("--iso-variants must be positive");
      save_csv(synth_generate(cfg.synth), synth_out, config_digest(cfg));
      log_line("wrote " + synth_out);
    } else if (*teacher) {
      const RunConfig cfg = resolve(teacher_c);
      const PreparedData data = prepare_data(cfg, load_or_synthesize(cfg));
      const TeacherRun t = run_teacher(cfg, data);
      write_text_file(teacher_out, dump_json(teacher_to_json(t.artifact)));
      const fs::path curve = dir_of(teacher_out) / "teacher_curve.csv";
      write_text_file(curve, t.artifact.curve.to_csv(config_digest(cfg)));
      const Matrix pred = predict(t.artifact.teacher, data.scaler.transform_features(data.raw_test.features));
      const MetricSet m = scalar_metrics(data.scaler.inverse_targets(pred.values()), data.raw_test.targets,
                                         Protocol::functional, SplitName::test);
      std::printf("teacher test: mse %.4f HRC^2, mae %.4f, r2 %.5f, %.1f s\n", m.mse, m.mae, m.r2.value_or(0.0),
                  t.wall_time_s);
      log_line("wrote " + teacher_out + " and " + curve.string());
    } else if (*student) {
      const RunConfig cfg = resolve(student_c);
      const TeacherArtifact t = teacher_from_json(read_json_file(student_teacher));
      const StudentRun s = run_student(cfg, t);
      save_pair(s.pair, student_out);
      const fs::path dir = dir_of(student_out);
      write_text_file(dir / "student_curve.csv", s.pair.student_curve.to_csv(config_digest(cfg)));
      const PreparedData data = prepare_data(cfg, load_or_synthesize(cfg));
      require_same_scaler(t.scaler, data.scaler);
      write_metrics(dir, kStudentName,
                    evaluate_inverse(kStudentName, mlp_inverse(s.pair.student), t.scaler, data.raw_test, &t.teacher,
                                     s.wall_time_s, cfg.student.seed, config_digest(cfg)));
    } else if (*rf || *mlp) {
      const bool is_rf = rf->parsed();
      const RunConfig cfg = resolve(is_rf ? rf_c : mlp_c);
      const std::string& teacher_path = is_rf ? rf_teacher : mlp_teacher;
      const std::string& out = is_rf ? rf_out : mlp_out;
      const PreparedData data = prepare_data(cfg, load_or_synthesize(cfg));
      std::optional<TeacherArtifact> t;
      if (!teacher_path.empty()) {
        t = teacher_from_json(read_json_file(teacher_path));
        require_same_scaler(t->scaler, data.scaler);
      }
      const fs::path dir = dir_of(out);
      InverseArtifact artifact;
      double wall = 0.0;
      if (is_rf) {
        ForestRun r = run_forest(cfg, data);
        artifact = std::move(r.artifact);
        wall = r.wall_time_s;
      } else {
        DirectRun r = run_direct_inverse(cfg, data);
        write_text_file(dir / "direct_mlp_curve.csv", r.curve.to_csv(config_digest(cfg)));
        artifact = std::move(r.artifact);
        wall = r.wall_time_s;
      }
      write_text_file(out, dump_json(inverse_to_json(artifact)));
      const std::string_view name = is_rf ? kForestName : kDirectName;
      write_metrics(dir, name,
                    evaluate_inverse(name, artifact.model(), data.scaler, data.raw_test, t ? &t->teacher : nullptr,
                                     wall, is_rf ? cfg.forest.seed : cfg.direct.seed, config_digest(cfg)));
    } else if (*td3) {
      const RunConfig cfg = resolve(td3_c);
      const TeacherArtifact t = teacher_from_json(read_json_file(td3_teacher));
      const Td3Run r = run_td3(cfg, t);
      write_text_file(td3_out, dump_json(inverse_to_json(r.artifact)));
      const fs::path dir = dir_of(td3_out);
      write_text_file(dir / "td3_reward.csv", r.curve.to_csv(config_digest(cfg)));
      const PreparedData data = prepare_data(cfg, load_or_synthesize(cfg));
      require_same_scaler(t.scaler, data.scaler);
      write_metrics(dir, kTd3Name,
                    evaluate_inverse(kTd3Name, r.artifact.model(), t.scaler, data.raw_test, &t.teacher, r.wall_time_s,
                                     cfg.td3.seed, config_digest(cfg)));
    } else if (*evaluate) {
      const RunConfig cfg = resolve(eval_c);
      const TrainedPair pair = load_pair(eval_pair);
      pair.scaler.require_steel_schema();
      std::optional<InverseArtifact> other;
      if (!eval_model.empty()) {
        other = inverse_from_json(read_json_file(eval_model));
        require_same_scaler(pair.scaler, other->scaler);
      }
      const PreparedData data = prepare_data(cfg, load_or_synthesize(cfg));
      const SplitName split = parse_split(eval_split);
      const Dataset& rows = split == SplitName::test ? data.raw_test : data.raw_train;
      const InverseModel model = other ? other->model() : mlp_inverse(pair.student);
      std::vector<MetricSet> sets;
      if (eval_protocol != "input-space") {
        sets.push_back(functional_eval(model, pair.teacher, pair.scaler, rows.targets, split));
      }
      if (eval_protocol != "functional") sets.push_back(input_space_eval(model, pair.scaler, rows, split));
      const std::string csv =
          metric_set_csv(other ? model_name(other->kind) : kStudentName, sets, config_digest(cfg));
      if (eval_out.empty()) {
        std::cout << csv;
      } else {
        write_text_file(eval_out, csv);
        log_line("wrote " + eval_out);
      }
    } else if (*report) {
      const ComparisonReport r = write_report(report_runs);
      std::cout << r.to_table();
      log_line("wrote report.csv, report.txt and plots.gp in " + report_runs);
    } else if (*run) {
      const RunConfig cfg = resolve(run_c);
      log_line("config digest " + config_digest(cfg));
      const PipelineResult res = run_pipeline(cfg, run_out, log_line);
      std::cout << res.report.to_table();
    } else if (*show) {
      const RunConfig cfg = resolve(cfg_c);
      std::cout << dump_json(config_to_json(cfg)) << "# config_digest=" << config_digest(cfg) << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
