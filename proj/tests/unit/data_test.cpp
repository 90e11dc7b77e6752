#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hardinv/common/errors.hpp"
#include "hardinv/data/csv.hpp"
#include "hardinv/data/scaler.hpp"
#include "hardinv/data/synth.hpp"

using namespace hardinv;

namespace {

const char* kHeader = "tempering_time_s,tempering_temp_C,C,Mn,P,S,Si,Ni,Cr,Mo,V,Al,Cu,hardness_HRC\n";
const char* kRow = "3600,400,0.4,0.8,0.01,0.01,0.2,0.1,0.5,0.1,0.0,0.02,0.1,45.5\n";

std::string rows(int n) {
  std::string s = kHeader;
  for (int i = 0; i < n; ++i) s += kRow;
  return s;
}

std::string error_of(const std::string& text) {
  try {
    parse_csv(text);
  } catch (const IngestError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("csv ingestion") {
  const Dataset ds = parse_csv(rows(2));
  CHECK(ds.size() == 2);
  CHECK(ds.features(1, 3) == 0.8);
  CHECK(ds.targets[0] == 45.5);
  CHECK_FALSE(ds.normalized);

  CHECK(error_of(kHeader) == "empty dataset");

  std::string bad = rows(4);
  bad += "3600,400,0.4,abc,0.01,0.01,0.2,0.1,0.5,0.1,0.0,0.02,0.1,45.5\n";
  const std::string msg = error_of(bad);
  CHECK(msg.find("row 5") != std::string::npos);
  CHECK(msg.find("Mn") != std::string::npos);

  CHECK(error_of("tempering_time_s,tempering_temp_C,C,Mn,P,S,Si,Ni,Cr,Mo,V,Al,hardness_HRC\n").find("missing column 'Cu'") !=
        std::string::npos);
  CHECK(error_of(std::string(kHeader) + "3600,400,0.4,0.8,0.01,0.01,0.2,0.1,0.5,0.1,0.0,0.02,0.1,85\n")
            .find("hardness_HRC") != std::string::npos);
  CHECK(error_of(std::string(kHeader) + "3600,400,-0.4,0.8,0.01,0.01,0.2,0.1,0.5,0.1,0.0,0.02,0.1,45\n")
            .find("column C") != std::string::npos);
  CHECK(error_of(std::string(kHeader) + "0,400,0.4,0.8,0.01,0.01,0.2,0.1,0.5,0.1,0.0,0.02,0.1,45\n")
            .find("tempering_time_s") != std::string::npos);
}

TEST_CASE("csv header is case-insensitive and order-free") {
  const std::string text =
      "HARDNESS_HRC,Cu,Al,V,Mo,Cr,Ni,Si,S,P,Mn,C,tempering_temp_c,TEMPERING_TIME_S\r\n"
      "45.5,0.1,0.02,0,0.1,0.5,0.1,0.2,0.01,0.01,0.8,0.4,400,3600\r\n";
  const Dataset ds = parse_csv(text);
  CHECK(ds.features(0, kTimeColumn) == 3600);
  CHECK(ds.features(0, kTemperatureColumn) == 400);
  CHECK(ds.targets[0] == 45.5);
}

TEST_CASE("csv round trip through the writer") {
  SynthConfig cfg;
  cfg.n_samples = 50;
  cfg.seed = 3;
  const Dataset ds = synth_generate(cfg);
  const Dataset back = parse_csv(dataset_to_csv(ds));
  CHECK(back.features == ds.features);
  CHECK(back.targets == ds.targets);

  const std::string tagged = dataset_to_csv(ds, "00ff");
  CHECK(tagged.starts_with("# config_digest=00ff\n"));
  CHECK(parse_csv(tagged).features == ds.features);
}

TEST_CASE("tempering parameter") {
  CHECK(tempering_parameter(300.0, 1000.0) == doctest::Approx(573.15 * 23.0 / 1000.0).epsilon(1e-14));
  CHECK(tempering_parameter_min() == doctest::Approx(473.15 * 23.0 / 1000.0).epsilon(1e-14));
  CHECK(tempering_parameter_max() == doctest::Approx(973.15 * 25.0 / 1000.0).epsilon(1e-14));
}

TEST_CASE("synthetic generator") {
  SynthConfig cfg;
  cfg.n_samples = 5000;
  cfg.noise_std = 0.5;
  cfg.seed = 42;
  const Dataset a = synth_generate(cfg);
  const Dataset b = synth_generate(cfg);
  CHECK(a.features == b.features);
  CHECK(a.targets == b.targets);
  CHECK_NOTHROW(validate_raw_steel(a));
  for (double y : a.targets) {
    CHECK(y >= 20.0);
    CHECK(y <= 65.0);
  }
  for (std::size_t r = 0; r < a.size(); ++r) {
    CHECK(a.features(r, kTemperatureColumn) >= 200.0);
    CHECK(a.features(r, kTemperatureColumn) <= 700.0);
    CHECK(a.features(r, kTimeColumn) >= 1e3 * (1 - 1e-12));
    CHECK(a.features(r, kTimeColumn) <= 1e5 * (1 + 1e-12));
  }
  cfg.seed = 43;
  CHECK_FALSE(synth_generate(cfg).targets == a.targets);
}

TEST_CASE("noiseless generator hardness depends on (T, t) only through P") {
  SynthConfig cfg;
  cfg.n_samples = 2;
  cfg.noise_std = 0.0;
  cfg.iso_variants = 2;
  cfg.seed = 5;
  const Dataset ds = synth_generate(cfg);
  CHECK(ds.features(0, kTemperatureColumn) != ds.features(1, kTemperatureColumn));
  CHECK(tempering_parameter(ds.features(0, 1), ds.features(0, 0)) ==
        tempering_parameter(ds.features(1, 1), ds.features(1, 0)));
  CHECK(ds.targets[0] == ds.targets[1]);
}

TEST_CASE("many-to-one witness over a grouped noiseless dataset") {
  SynthConfig cfg;
  cfg.n_samples = 2000;
  cfg.noise_std = 0.0;
  cfg.iso_variants = 4;
  cfg.seed = 9;
  const Dataset ds = synth_generate(cfg);
  std::map<std::vector<double>, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    std::vector<double> key{tempering_parameter(ds.features(r, 1), ds.features(r, 0))};
    for (std::size_t c = kFirstElementColumn; c < kFeatureCount; ++c) key.push_back(ds.features(r, c));
    groups[key].push_back(r);
  }
  std::size_t multi = 0;
  for (const auto& [key, members] : groups) {
    if (members.size() < 2) continue;
    ++multi;
    std::set<std::pair<double, double>> settings;
    for (std::size_t r : members) {
      CHECK(ds.targets[r] == ds.targets[members[0]]);
      settings.emplace(ds.features(r, 0), ds.features(r, 1));
    }
    CHECK(settings.size() == members.size());
  }
  CHECK(multi == 500);
}

TEST_CASE("scaler") {
  SUBCASE("degenerate column maps to 0.5 and back") {
    Dataset ds{Matrix::from_rows({{3.2, 1.0}, {3.2, 2.0}, {3.2, 4.0}}), {1.0, 2.0, 3.0}, false};
    const Scaler s = Scaler::fit(ds);
    const Dataset t = s.transform(ds);
    for (std::size_t r = 0; r < 3; ++r) CHECK(t.features(r, 0) == 0.5);
    CHECK(t.features(0, 1) == 0.0);
    CHECK(t.features(2, 1) == 1.0);
    CHECK(t.targets[0] == 0.0);
    CHECK(t.targets[2] == 1.0);
    CHECK(s.inverse_transform(t).features(1, 0) == 3.2);
  }
  SUBCASE("round trip is exact to 1e-12 relative") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SynthConfig cfg;
      cfg.n_samples = 300;
      cfg.seed = seed;
      const Dataset ds = synth_generate(cfg);
      const Scaler s = Scaler::fit(ds);
      const Dataset back = s.inverse_transform(s.transform(ds));
      for (std::size_t i = 0; i < ds.features.size(); ++i) {
        const double want = ds.features.values()[i];
        CHECK(std::abs(back.features.values()[i] - want) <= 1e-12 * std::abs(want));
      }
      for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(std::abs(back.targets[i] - ds.targets[i]) <= 1e-12 * std::abs(ds.targets[i]));
      }
    }
  }
  SUBCASE("unfitted scaler refuses to transform") {
    const Scaler s;
    CHECK_THROWS_AS(s.transform_features(Matrix(1, 13)), ContractError);
    CHECK_THROWS_AS(s.transform_target(1.0), ContractError);
  }
  SUBCASE("json round trip and schema check") {
    SynthConfig cfg;
    cfg.n_samples = 20;
    const Scaler s = Scaler::fit(synth_generate(cfg));
    CHECK(Scaler::from_json(s.to_json()) == s);
    CHECK_NOTHROW(s.require_steel_schema());
    Json doc = s.to_json();
    doc["columns"][3] = "Mg";
    try {
      Scaler::from_json(doc).require_steel_schema();
      CHECK(false);
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find("Mn") != std::string::npos);
    }
  }
}

TEST_CASE("split") {
  Dataset ds{Matrix(10, 1), {}, false};
  for (std::size_t i = 0; i < 10; ++i) {
    ds.features(i, 0) = static_cast<double>(i);
    ds.targets.push_back(static_cast<double>(i) * 10);
  }
  const auto [train, test] = split(ds, 0.2, 7);
  CHECK(train.size() == 8);
  CHECK(test.size() == 2);
  const auto [train2, test2] = split(ds, 0.2, 7);
  CHECK(train2.targets == train.targets);
  CHECK(test2.targets == test.targets);
  std::multiset<double> all(train.targets.begin(), train.targets.end());
  all.insert(test.targets.begin(), test.targets.end());
  CHECK(all == std::multiset<double>(ds.targets.begin(), ds.targets.end()));
  for (std::size_t i = 0; i < train.size(); ++i) CHECK(train.targets[i] == train.features(i, 0) * 10);
  CHECK_THROWS_AS(split(ds, 0.0, 1), ContractError);
  CHECK_THROWS_AS(split(ds, 1.0, 1), ContractError);
}

TEST_CASE("sample_targets") {
  SynthConfig cfg;
  cfg.n_samples = 20;
  const Scaler s = Scaler::fit(synth_generate(cfg));
  Rng a(11);
  Rng b(11);
  const Matrix x = sample_targets(s, 4, a);
  CHECK(x.rows() == 4);
  for (double v : x.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(sample_targets(s, 4, b) == x);

  Rng big(12);
  const Matrix many = sample_targets(s, 10000, big);
  double mean = 0.0;
  for (double v : many.values()) mean += v;
  mean /= 10000.0;
  CHECK(std::abs(mean - 0.5) < 0.02);

  CHECK_THROWS_AS(sample_targets(Scaler{}, 4, a), ContractError);
}

TEST_CASE("conditional variance floor") {
  SynthConfig cfg;
  cfg.seed = 1;
  const ConditionalVarianceFloor f = conditional_variance_floor(cfg, 100000, 200);
  // Unconditional variances of the sampling distributions bound the floor.
  const double ln100 = std::log(100.0);
  const double mean_t = (1e5 - 1e3) / ln100;
  const double var_t = (1e10 - 1e6) / (2 * ln100) - mean_t * mean_t;
  CHECK(f.per_feature[kTimeColumn] > 0.3 * var_t);
  CHECK(f.per_feature[kTimeColumn] < var_t);
  CHECK(f.per_feature[kTemperatureColumn] < 500.0 * 500.0 / 12.0);
  for (std::size_t e = 0; e < kElementCount; ++e) {
    const double w = kDefaultElementRanges[e].hi - kDefaultElementRanges[e].lo;
    CHECK(f.per_feature[kFirstElementColumn + e] <= w * w / 12.0 * 1.05);
    CHECK(f.per_feature[kFirstElementColumn + e] > 0.0);
  }
  // Carbon moves hardness the most, so knowing hardness narrows it the most.
  const double carbon_ratio = f.per_feature[kFirstElementColumn] / (0.25 / 12.0);
  CHECK(carbon_ratio < 0.95);
  CHECK(f.mean > 0.0);
}
