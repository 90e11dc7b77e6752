#include "hardinv/experiment/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>

#include "hardinv/common/errors.hpp"

namespace hardinv {

namespace {

struct Value {
  std::string text;
  bool quoted = false;
};

using Setter = std::function<void(RunConfig&, const std::string& key, const Value&)>;

struct Field {
  std::string key;
  Setter set;
};

[[noreturn]] void bad_value(const std::string& key, const Value& v, std::string_view expected) {
  throw ConfigError("config key '" + key + "': expected " + std::string(expected) + ", got '" + v.text + "'");
}

std::uint64_t as_uint(const std::string& key, const Value& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (v.quoted || v.text.empty() || res.ec != std::errc() || res.ptr != v.text.data() + v.text.size()) {
    bad_value(key, v, "a non-negative integer");
  }
  return out;
}

std::size_t as_count(const std::string& key, const Value& v) {
  const std::uint64_t n = as_uint(key, v);
  if (n == 0) bad_value(key, v, "a positive integer");
  return static_cast<std::size_t>(n);
}

double as_double(const std::string& key, const Value& v) {
  double out = 0.0;
  std::string_view s = v.text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (v.quoted || s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(out)) {
    bad_value(key, v, "a number");
  }
  return out;
}

double as_positive(const std::string& key, const Value& v) {
  const double d = as_double(key, v);
  if (!(d > 0.0)) bad_value(key, v, "a positive number");
  return d;
}

double as_non_negative(const std::string& key, const Value& v) {
  const double d = as_double(key, v);
  if (!(d >= 0.0)) bad_value(key, v, "a non-negative number");
  return d;
}

double as_fraction(const std::string& key, const Value& v) {
  const double d = as_double(key, v);
  if (!(d > 0.0 && d < 1.0)) bad_value(key, v, "a fraction in (0, 1)");
  return d;
}

bool as_bool(const std::string& key, const Value& v) {
  if (!v.quoted && v.text == "true") return true;
  if (!v.quoted && v.text == "false") return false;
  bad_value(key, v, "true or false");
}

std::string as_string(const std::string& key, const Value& v) {
  if (!v.quoted) bad_value(key, v, "a quoted string");
  return v.text;
}

template <class Get>
Field count_field(std::string key, Get get) {
  return {std::move(key), [get](RunConfig& c, const std::string& k, const Value& v) { get(c) = as_count(k, v); }};
}

template <class Get>
Field uint_field(std::string key, Get get) {
  return {std::move(key), [get](RunConfig& c, const std::string& k, const Value& v) {
            get(c) = static_cast<std::size_t>(as_uint(k, v));
          }};
}

template <class Get>
Field positive_field(std::string key, Get get) {
  return {std::move(key), [get](RunConfig& c, const std::string& k, const Value& v) { get(c) = as_positive(k, v); }};
}

template <class Get>
Field non_negative_field(std::string key, Get get) {
  return {std::move(key),
          [get](RunConfig& c, const std::string& k, const Value& v) { get(c) = as_non_negative(k, v); }};
}

void add_train_fields(std::vector<Field>& f, const std::string& section, TrainConfig RunConfig::*member,
                      bool with_steps) {
  f.push_back(uint_field(section + ".epochs", [member](RunConfig& c) -> std::size_t& { return (c.*member).epochs; }));
  f.push_back(
      count_field(section + ".batch_size", [member](RunConfig& c) -> std::size_t& { return (c.*member).batch_size; }));
  f.push_back(positive_field(section + ".lr", [member](RunConfig& c) -> double& { return (c.*member).lr; }));
  f.push_back(count_field(section + ".hidden", [member](RunConfig& c) -> std::size_t& { return (c.*member).hidden; }));
  f.push_back(
      count_field(section + ".eval_every", [member](RunConfig& c) -> std::size_t& { return (c.*member).eval_every; }));
  if (with_steps) {
    f.push_back(count_field(section + ".steps_per_epoch",
                            [member](RunConfig& c) -> std::size_t& { return (c.*member).steps_per_epoch; }));
  }
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"seed", [](RunConfig& c, const std::string& k, const Value& v) { c.seed = as_uint(k, v); }});

    f.push_back(count_field("data.n_samples", [](RunConfig& c) -> std::size_t& { return c.synth.n_samples; }));
    f.push_back(non_negative_field("data.noise_std", [](RunConfig& c) -> double& { return c.synth.noise_std; }));
    f.push_back(count_field("data.iso_variants", [](RunConfig& c) -> std::size_t& { return c.synth.iso_variants; }));
    f.push_back({"data.path", [](RunConfig& c, const std::string& k, const Value& v) { c.data_path = as_string(k, v); }});
    f.push_back({"data.test_fraction",
                 [](RunConfig& c, const std::string& k, const Value& v) { c.test_fraction = as_fraction(k, v); }});
    f.push_back({"data.val_fraction",
                 [](RunConfig& c, const std::string& k, const Value& v) { c.val_fraction = as_fraction(k, v); }});

    add_train_fields(f, "teacher", &RunConfig::teacher, false);
    add_train_fields(f, "student", &RunConfig::student, true);
    add_train_fields(f, "direct_inverse", &RunConfig::direct, false);

    f.push_back(count_field("forest.n_trees", [](RunConfig& c) -> std::size_t& { return c.forest.n_trees; }));
    f.push_back(uint_field("forest.max_depth", [](RunConfig& c) -> std::size_t& { return c.forest.max_depth; }));
    f.push_back(count_field("forest.min_leaf", [](RunConfig& c) -> std::size_t& { return c.forest.min_leaf; }));
    f.push_back(count_field("forest.features_per_split",
                            [](RunConfig& c) -> std::size_t& { return c.forest.features_per_split; }));
    f.push_back({"forest.bootstrap",
                 [](RunConfig& c, const std::string& k, const Value& v) { c.forest.bootstrap = as_bool(k, v); }});
    f.push_back(count_field("forest.threads", [](RunConfig& c) -> std::size_t& { return c.forest.threads; }));

    f.push_back(count_field("td3.total_steps", [](RunConfig& c) -> std::size_t& { return c.td3.total_steps; }));
    f.push_back(uint_field("td3.warmup_steps", [](RunConfig& c) -> std::size_t& { return c.td3.warmup_steps; }));
    f.push_back(count_field("td3.batch", [](RunConfig& c) -> std::size_t& { return c.td3.batch; }));
    f.push_back(positive_field("td3.actor_lr", [](RunConfig& c) -> double& { return c.td3.actor_lr; }));
    f.push_back(positive_field("td3.critic_lr", [](RunConfig& c) -> double& { return c.td3.critic_lr; }));
    f.push_back({"td3.tau", [](RunConfig& c, const std::string& k, const Value& v) {
                   const double t = as_double(k, v);
                   if (!(t > 0.0 && t <= 1.0)) bad_value(k, v, "a number in (0, 1]");
                   c.td3.tau = t;
                 }});
    f.push_back(count_field("td3.policy_delay", [](RunConfig& c) -> std::size_t& { return c.td3.policy_delay; }));
    f.push_back(non_negative_field("td3.exploration_noise_std",
                                   [](RunConfig& c) -> double& { return c.td3.exploration_noise_std; }));
    f.push_back(
        non_negative_field("td3.target_noise_std", [](RunConfig& c) -> double& { return c.td3.target_noise_std; }));
    f.push_back(
        non_negative_field("td3.target_noise_clip", [](RunConfig& c) -> double& { return c.td3.target_noise_clip; }));
    f.push_back(count_field("td3.actor_hidden", [](RunConfig& c) -> std::size_t& { return c.td3.actor_hidden; }));
    f.push_back(count_field("td3.critic_hidden", [](RunConfig& c) -> std::size_t& { return c.td3.critic_hidden; }));
    f.push_back(
        count_field("td3.buffer_capacity", [](RunConfig& c) -> std::size_t& { return c.td3.buffer_capacity; }));
    f.push_back(
        count_field("td3.smoothing_window", [](RunConfig& c) -> std::size_t& { return c.td3.smoothing_window; }));
    return f;
  }();
  return table;
}

void assign(RunConfig& cfg, const std::string& key, const Value& v) {
  for (const Field& f : fields()) {
    if (f.key == key) {
      f.set(cfg, key, v);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Strips a trailing comment and reads one scalar value.
Value parse_value(std::string_view raw, const std::string& key) {
  std::string_view s = trim(raw);
  if (!s.empty() && s.front() == '"') {
    const std::size_t close = s.find('"', 1);
    if (close == std::string_view::npos) throw ConfigError("config key '" + key + "': unterminated string");
    const std::string_view rest = trim(s.substr(close + 1));
    if (!rest.empty() && rest.front() != '#') throw ConfigError("config key '" + key + "': trailing characters");
    return {std::string(s.substr(1, close - 1)), true};
  }
  const std::size_t hash = s.find('#');
  if (hash != std::string_view::npos) s = trim(s.substr(0, hash));
  if (s.empty()) throw ConfigError("config key '" + key + "': missing value");
  std::string text(s);
  std::erase(text, '_');  // 40_000
  return {text, false};
}

}  // namespace

void RunConfig::derive_seeds() {
  teacher.seed = seed + kTeacherSeedOffset;
  student.seed = seed + kStudentSeedOffset;
  forest.seed = seed + kForestSeedOffset;
  direct.seed = seed + kDirectSeedOffset;
  td3.seed = seed + kTd3SeedOffset;
  synth.seed = seed + kDataSeedOffset;
}

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.direct.epochs = 1000;
  cfg.derive_seeds();
  return cfg;
}

void apply_config_text(RunConfig& cfg, std::string_view text, std::string_view origin) {
  std::string section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      const std::size_t close = line.find(']');
      if (close == std::string_view::npos) throw ConfigError(where + ": malformed section header");
      section = std::string(trim(line.substr(1, close - 1)));
      const std::string_view rest = trim(line.substr(close + 1));
      if (!rest.empty() && rest.front() != '#') throw ConfigError(where + ": trailing characters after section");
      const std::string prefix = section + ".";
      bool known = false;
      for (const Field& f : fields()) known = known || f.key.starts_with(prefix);
      if (!known) throw ConfigError(where + ": unknown config section '" + section + "'");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const std::string name(trim(line.substr(0, eq)));
    const std::string key = section.empty() ? name : section + "." + name;
    try {
      assign(cfg, key, parse_value(line.substr(eq + 1), key));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
    if (end == text.size()) break;
  }
  cfg.derive_seeds();
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config file '" + path + "': " + e.what());
  }
  apply_config_text(cfg, text, path);
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form section.key=value");
  }
  const std::string key(trim(assignment.substr(0, eq)));
  std::string_view raw = trim(assignment.substr(eq + 1));
  // Strings may be given bare on the command line.
  if (key == "data.path" && (raw.empty() || raw.front() != '"')) {
    assign(cfg, key, Value{std::string(raw), true});
  } else {
    assign(cfg, key, parse_value(raw, key));
  }
  cfg.derive_seeds();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Field& f : fields()) out.push_back(f.key);
  return out;
}

Json config_to_json(const RunConfig& c) {
  const auto train = [](const TrainConfig& t) {
    return Json{{"epochs", t.epochs},         {"batch_size", t.batch_size}, {"lr", t.lr},
                {"hidden", t.hidden},         {"eval_every", t.eval_every}, {"seed", t.seed},
                {"steps_per_epoch", t.steps_per_epoch}};
  };
  Json ranges = Json::array();
  for (const ElementRange& r : c.synth.element_ranges) ranges.push_back(Json::array({r.lo, r.hi}));
  return Json{
      {"seed", c.seed},
      {"data",
       {{"path", c.data_path},
        {"n_samples", c.synth.n_samples},
        {"noise_std", c.synth.noise_std},
        {"iso_variants", c.synth.iso_variants},
        {"element_ranges", std::move(ranges)},
        {"synth_seed", c.synth.seed},
        {"test_fraction", c.test_fraction},
        {"val_fraction", c.val_fraction}}},
      {"teacher", train(c.teacher)},
      {"student", train(c.student)},
      {"direct_inverse", train(c.direct)},
      {"forest",
       {{"n_trees", c.forest.n_trees},
        {"max_depth", c.forest.max_depth},
        {"min_leaf", c.forest.min_leaf},
        {"features_per_split", c.forest.features_per_split},
        {"bootstrap", c.forest.bootstrap},
        {"seed", c.forest.seed}}},
      {"td3",
       {{"total_steps", c.td3.total_steps},
        {"warmup_steps", c.td3.warmup_steps},
        {"batch", c.td3.batch},
        {"actor_lr", c.td3.actor_lr},
        {"critic_lr", c.td3.critic_lr},
        {"tau", c.td3.tau},
        {"policy_delay", c.td3.policy_delay},
        {"exploration_noise_std", c.td3.exploration_noise_std},
        {"target_noise_std", c.td3.target_noise_std},
        {"target_noise_clip", c.td3.target_noise_clip},
        {"actor_hidden", c.td3.actor_hidden},
        {"critic_hidden", c.td3.critic_hidden},
        {"buffer_capacity", c.td3.buffer_capacity},
        {"smoothing_window", c.td3.smoothing_window},
        {"seed", c.td3.seed}}},
  };
}

std::string config_digest(const RunConfig& cfg) {
  Fnv1a h;
  h.update(dump_json(config_to_json(cfg)));
  return h.hex();
}

}  // namespace hardinv
