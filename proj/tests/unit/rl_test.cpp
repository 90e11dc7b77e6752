#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hardinv/common/errors.hpp"
#include "hardinv/rl/replay_buffer.hpp"
#include "hardinv/rl/td3.hpp"
#include "helpers.hpp"

using namespace hardinv;
using hardinv::testing::identity_net;

namespace {

Scaler unit_scaler(std::size_t features) {
  Dataset ds{Matrix(2, features), {0.0, 1.0}, false};
  for (std::size_t c = 0; c < features; ++c) ds.features(1, c) = 1.0;
  return Scaler::fit(ds);
}

Mlp frozen_identity() {
  Mlp t = identity_net();
  t.freeze();
  return t;
}

}  // namespace

TEST_CASE("env_step rewards") {
  const Mlp teacher = frozen_identity();
  const Scaler s = unit_scaler(1);
  // Action 0.2 maps to 0.6 in the feature box.
  const std::vector<double> a{0.2};
  CHECK(env_step(teacher, s, 0.6, a) == 0.0);
  CHECK(env_step(teacher, s, 0.1, a) == -(0.5 * 0.5));
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double y = rng.uniform();
    const std::vector<double> act{rng.uniform(-1.0, 1.0)};
    const double mapped = (act[0] + 1.0) / 2.0;
    const double r = env_step(teacher, s, y, act);
    CHECK(r <= 0.0);
    CHECK(r == -((mapped - y) * (mapped - y)));
  }
  CHECK_THROWS_AS(env_step(teacher, s, 0.5, std::vector<double>{1.5}), ContractError);
  CHECK_THROWS_AS(env_step(teacher, s, 0.5, std::vector<double>{0.0, 0.0}), DimensionError);
}

TEST_CASE("replay buffer") {
  ReplayBuffer buf(3, 2);
  Rng rng(2);
  CHECK_THROWS_AS(buf.sample(1, rng), ContractError);
  for (int i = 0; i < 5; ++i) buf.push({double(i), {0.1 * i, -0.1 * i}, -double(i), true});
  CHECK(buf.size() == 3);
  // Ring order: slots hold 3, 4, 2.
  CHECK(buf.at(0).state == 3.0);
  CHECK(buf.at(1).state == 4.0);
  CHECK(buf.at(2).state == 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    const TransitionBatch b = buf.sample(3, rng);
    for (std::size_t i = 0; i < 3; ++i) {
      const double s = b.states(i, 0);
      CHECK((s == 2.0 || s == 3.0 || s == 4.0));
      CHECK(b.rewards[i] == -s);
      CHECK(b.actions(i, 0) == 0.1 * s);
    }
  }
  CHECK_THROWS_AS(buf.sample(4, rng), ContractError);
  CHECK_THROWS_AS(buf.push({0.0, {2.0, 0.0}, 0.0, true}), ContractError);
  CHECK_THROWS_AS(buf.push({0.0, {0.0}, 0.0, true}), DimensionError);
  CHECK_THROWS_AS(buf.push({0.0, {0.0, 0.0}, 0.0, false}), ContractError);
}

TEST_CASE("critic target equals the reward on a fixed buffer") {
  ReplayBuffer buf(100, 1);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) buf.push({rng.uniform(), {rng.uniform(-1.0, 1.0)}, -rng.uniform(), true});
  const TransitionBatch b = buf.sample(50, rng);
  CHECK(critic_targets(b) == b.rewards);
  TransitionBatch open = b;
  open.terminal[3] = false;
  CHECK_THROWS_AS(critic_targets(open), ContractError);
}

TEST_CASE("td3 on a 1-D identity teacher") {
  const Mlp teacher = frozen_identity();
  const std::string digest = teacher.digest();
  Td3Config cfg;
  cfg.total_steps = 5000;
  cfg.actor_hidden = 16;
  cfg.critic_hidden = 32;
  cfg.seed = 4;
  const Td3Result res = td3_train(teacher, unit_scaler(1), cfg);
  REQUIRE(res.curve.points.size() == 5000);
  double sum = 0.0;
  for (std::size_t i = 4500; i < 5000; ++i) sum += res.curve.points[i].raw;
  CHECK(sum / 500.0 > -0.01);
  CHECK(teacher.digest() == digest);
  CHECK(res.critic_updates == 4000);

  // Bounded head.
  const Matrix grid = Matrix::column(std::vector<double>{-5.0, 0.0, 0.5, 1.0, 5.0});
  const Matrix actions = actor_actions(res.actor, grid);
  for (double a : actions.values()) {
    CHECK(a >= -1.0);
    CHECK(a <= 1.0);
  }
  // Smoothed curve is the trailing mean over 100 steps.
  double tail = 0.0;
  for (std::size_t i = 4900; i < 5000; ++i) tail += res.curve.points[i].raw;
  CHECK(res.curve.points.back().smoothed == doctest::Approx(tail / 100.0).epsilon(1e-12));
  CHECK(res.curve.points.front().smoothed == res.curve.points.front().raw);
}

TEST_CASE("td3 is deterministic per seed") {
  const Mlp teacher = hardinv::testing::random_net({3, 4, 1}, OutputMode::linear, 5);
  Mlp frozen = teacher;
  frozen.freeze();
  Td3Config cfg;
  cfg.total_steps = 400;
  cfg.warmup_steps = 100;
  cfg.batch = 32;
  cfg.actor_hidden = 8;
  cfg.critic_hidden = 8;
  cfg.seed = 6;
  const Td3Result a = td3_train(frozen, unit_scaler(3), cfg);
  const Td3Result b = td3_train(frozen, unit_scaler(3), cfg);
  CHECK(a.actor == b.actor);
  CHECK(a.critic1 == b.critic1);
  CHECK(a.curve == b.curve);
  cfg.seed = 7;
  CHECK_FALSE(td3_train(frozen, unit_scaler(3), cfg).actor == a.actor);
}

TEST_CASE("td3 preconditions") {
  Mlp loose = identity_net();
  CHECK_THROWS_AS(td3_train(loose, unit_scaler(1), Td3Config{}), ContractError);
  const Mlp teacher = frozen_identity();
  CHECK_THROWS_AS(td3_train(teacher, unit_scaler(2), Td3Config{}), DimensionError);
  Td3Config bad;
  bad.tau = 0.0;
  CHECK_THROWS_AS(td3_train(teacher, unit_scaler(1), bad), ContractError);
}

TEST_CASE("reward curve csv") {
  RewardCurve c{{{1, -0.5, -0.5}, {2, -0.25, -0.375}}};
  CHECK(c.to_csv("d1") == "# config_digest=d1\nstep,raw_reward,smoothed_reward\n1,-0.5,-0.5\n2,-0.25,-0.375\n");
}

TEST_CASE("actor as an inverse model maps into the feature box") {
  const Mlp actor = hardinv::testing::random_net({1, 4, 3}, OutputMode::sigmoid, 8);
  const Matrix x = actor_inverse(actor)(Matrix::column(std::vector<double>{0.0, 0.5, 1.0}));
  for (double v : x.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}
