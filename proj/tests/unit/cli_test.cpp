#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <set>

#include "hardinv/common/json_io.hpp"
#include "hardinv/eval/report.hpp"

namespace fs = std::filesystem;
using hardinv::read_text_file;

namespace {

struct Outcome {
  int code = -1;
  std::string err;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "hardinv_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Outcome cli(const std::string& args) {
  const fs::path err = workdir() / "stderr.txt";
  const std::string cmd = std::string(HARDINV_CLI) + " " + args + " > " + (workdir() / "stdout.txt").string() +
                          " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.err = read_text_file(err);
  return o;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

const char* kTiny =
    "--set data.n_samples=300 --set teacher.epochs=5 --set student.epochs=3 --set student.steps_per_epoch=10 "
    "--set direct_inverse.epochs=5 --set forest.n_trees=3 --set td3.total_steps=300 --set td3.warmup_steps=100 "
    "--set td3.batch=32 --set td3.actor_hidden=8 --set td3.critic_hidden=8";

}  // namespace

TEST_CASE("synth twice gives byte-identical files") {
  REQUIRE(cli("synth --n 100 --seed 7 --out " + path("a.csv")).code == 0);
  REQUIRE(cli("synth --n 100 --seed 7 --out " + path("b.csv")).code == 0);
  CHECK(read_text_file(path("a.csv")) == read_text_file(path("b.csv")));
  REQUIRE(cli("synth --n 100 --seed 8 --out " + path("c.csv")).code == 0);
  CHECK(read_text_file(path("a.csv")) != read_text_file(path("c.csv")));
}

TEST_CASE("usage and config errors exit with 2") {
  CHECK(cli("").code == 2);
  CHECK(cli("synth").code == 2);
  CHECK(cli("frobnicate").code == 2);
  const Outcome bad_key = cli("synth --out " + path("x.csv") + " --set teacher.epoch=3");
  CHECK(bad_key.code == 2);
  CHECK(bad_key.err.find("teacher.epoch") != std::string::npos);
  hardinv::write_text_file(path("bad.toml"), "[td3]\nwarmup = 5\n");
  const Outcome bad_file = cli("config --config " + path("bad.toml"));
  CHECK(bad_file.code == 2);
  CHECK(bad_file.err.find("td3.warmup") != std::string::npos);
  CHECK(cli("config --config " + path("missing.toml")).code == 2);
}

TEST_CASE("runtime failures exit with 1") {
  hardinv::write_text_file(path("broken.csv"), "not,a,dataset\n1,2,3\n");
  const Outcome o = cli("train-teacher --data " + path("broken.csv") + " --out " + path("t.json"));
  CHECK(o.code == 1);
  CHECK(o.err.find("unexpected column") != std::string::npos);
}

TEST_CASE("step-by-step subcommands, evaluate and report") {
  const std::string dir = path("steps");
  const std::string tiny = kTiny;
  REQUIRE(cli("train-teacher " + tiny + " --out " + dir + "/teacher.json").code == 0);
  REQUIRE(cli("train-student " + tiny + " --teacher " + dir + "/teacher.json --out " + dir + "/pair.json").code == 0);
  REQUIRE(cli("baseline-rf " + tiny + " --teacher " + dir + "/teacher.json --out " + dir + "/rf.json").code == 0);
  REQUIRE(cli("baseline-mlp " + tiny + " --teacher " + dir + "/teacher.json --out " + dir + "/mlp.json").code == 0);
  REQUIRE(cli("train-td3 " + tiny + " --teacher " + dir + "/teacher.json --out " + dir + "/td3.json").code == 0);
  REQUIRE(cli("report --runs " + dir).code == 0);
  std::set<std::string> models;
  for (const auto& e : hardinv::parse_report_csv(read_text_file(dir + "/report.csv"))) models.insert(e.model);
  CHECK(models.size() == 4);
  CHECK(fs::exists(dir + "/plots.gp"));
  CHECK(fs::exists(dir + "/report.txt"));

  REQUIRE(cli("evaluate " + tiny + " --pair " + dir + "/pair.json --protocol functional --out " + dir + "/eval.csv")
              .code == 0);
  const std::string eval = read_text_file(dir + "/eval.csv");
  CHECK(eval.find("model,protocol,split,n,mse,mae,r2\n") != std::string::npos);
  CHECK(eval.find("teacher_student,functional,test,60,") != std::string::npos);
  REQUIRE(cli("evaluate " + tiny + " --pair " + dir + "/pair.json --model " + dir + "/rf.json --out " + dir +
              "/eval_rf.csv")
              .code == 0);
  CHECK(read_text_file(dir + "/eval_rf.csv").find("random_forest,input-space,test") != std::string::npos);

  // A pair whose scaler disagrees with the dataset schema.
  hardinv::Json pair = hardinv::read_json_file(dir + "/pair.json");
  pair["scaler"]["columns"][8] = "Chromium";
  hardinv::write_text_file(dir + "/bad_pair.json", hardinv::dump_json(pair));
  const Outcome o = cli("evaluate " + tiny + " --pair " + dir + "/bad_pair.json");
  CHECK(o.code == 2);
  CHECK(o.err.find("Chromium") != std::string::npos);
  CHECK(o.err.find("Cr") != std::string::npos);

  // Mismatched dataset: different seed gives a different scaler.
  const Outcome m = cli("baseline-rf " + tiny + " --seed 3 --teacher " + dir + "/teacher.json --out " + dir + "/x.json");
  CHECK(m.code == 2);
}

TEST_CASE("full pipeline reports four models") {
  const std::string dir = path("run");
  REQUIRE(cli(std::string("run ") + kTiny + " --out " + dir).code == 0);
  std::set<std::string> models;
  for (const auto& e : hardinv::parse_report_csv(read_text_file(dir + "/report.csv"))) models.insert(e.model);
  CHECK(models == std::set<std::string>{"direct_mlp", "random_forest", "td3", "teacher_student"});
}
