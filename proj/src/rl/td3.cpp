#include "hardinv/rl/td3.hpp"

#include <algorithm>
#include <cmath>

#include "hardinv/common/errors.hpp"
#include "hardinv/common/json_io.hpp"
#include "hardinv/common/rng.hpp"
#include "hardinv/nncore/adam.hpp"
#include "hardinv/nncore/loss.hpp"

namespace hardinv {

namespace {

void validate(const Td3Config& c) {
  if (c.total_steps == 0 || c.batch == 0 || c.policy_delay == 0 || c.actor_hidden == 0 || c.critic_hidden == 0 ||
      c.buffer_capacity == 0 || c.smoothing_window == 0) {
    throw ContractError("Td3Config: counts must be positive");
  }
  if (!(c.tau > 0.0 && c.tau <= 1.0)) throw ContractError("Td3Config: tau must lie in (0, 1]");
  if (!(c.actor_lr > 0.0) || !(c.critic_lr > 0.0)) throw ContractError("Td3Config: learning rates must be positive");
  if (!(c.exploration_noise_std >= 0.0) || !(c.target_noise_std >= 0.0) || !(c.target_noise_clip >= 0.0)) {
    throw ContractError("Td3Config: noise scales must be non-negative");
  }
  if (c.buffer_capacity < c.batch) throw ContractError("Td3Config: buffer_capacity must be at least batch");
}

void check_teacher(const Mlp& teacher) {
  if (!teacher.frozen()) throw ContractError("td3: teacher must be frozen");
  if (teacher.output_width() != 1) throw DimensionError("td3: teacher must have one output");
}

Matrix state_action(const Matrix& states, const Matrix& actions) {
  Matrix out(states.rows(), 1 + actions.cols());
  for (std::size_t r = 0; r < states.rows(); ++r) {
    auto dst = out.row(r);
    dst[0] = states(r, 0);
    const auto a = actions.row(r);
    std::copy(a.begin(), a.end(), dst.begin() + 1);
  }
  return out;
}

void fit_critic(Mlp& critic, AdamState& adam, const Matrix& input, const Matrix& target) {
  const ForwardResult fwd = forward(critic, input);
  const LossValue lv = mse(fwd.output, target);
  adam_step(critic, backward(critic, fwd.cache, lv.grad), adam);
}

// Deterministic policy gradient on -mean Q1(s, actor(s)).
void fit_actor(Mlp& actor, AdamState& adam, const Mlp& critic, const Matrix& states) {
  const ForwardResult fa = forward(actor, states);
  Matrix actions = fa.output;
  for (double& v : actions.values()) v = 2.0 * v - 1.0;
  const ForwardResult fq = forward(critic, state_action(states, actions));
  const Matrix dq(states.rows(), 1, -1.0 / static_cast<double>(states.rows()));
  const Matrix d_in = input_gradient(critic, fq.cache, dq);
  Matrix d_out(states.rows(), actions.cols());
  for (std::size_t r = 0; r < d_out.rows(); ++r) {
    for (std::size_t k = 0; k < d_out.cols(); ++k) d_out(r, k) = 2.0 * d_in(r, k + 1);
  }
  adam_step(actor, backward(actor, fa.cache, d_out), adam);
}

}  // namespace

std::string RewardCurve::to_csv(const std::string& config_digest) const {
  std::string out;
  if (!config_digest.empty()) out += "# config_digest=" + config_digest + "\n";
  out += "step,raw_reward,smoothed_reward\n";
  for (const RewardPoint& p : points) {
    out += std::to_string(p.step) + "," + format_double(p.raw) + "," + format_double(p.smoothed) + "\n";
  }
  return out;
}

Matrix map_action(const Matrix& action) {
  Matrix out = action;
  for (double& v : out.values()) v = (v + 1.0) / 2.0;
  return out;
}

Matrix actor_actions(const Mlp& actor, const Matrix& states) {
  if (actor.output_mode() != OutputMode::sigmoid) throw ContractError("actor_actions: actor needs a sigmoid head");
  Matrix out = predict(actor, states);
  for (double& v : out.values()) v = 2.0 * v - 1.0;
  return out;
}

std::vector<double> env_rewards(const Mlp& teacher, const Matrix& states, const Matrix& actions) {
  if (states.cols() != 1 || states.rows() != actions.rows()) throw DimensionError("env: states must be N x 1");
  if (actions.cols() != teacher.input_width()) {
    throw DimensionError("env: action has " + std::to_string(actions.cols()) + " components, teacher expects " +
                         std::to_string(teacher.input_width()));
  }
  for (double a : actions.values()) {
    if (!(a >= -1.0 && a <= 1.0)) throw ContractError("env: action component outside [-1, 1]");
  }
  const Matrix achieved = predict(teacher, map_action(actions));
  std::vector<double> rewards(states.rows());
  for (std::size_t r = 0; r < rewards.size(); ++r) {
    const double d = achieved(r, 0) - states(r, 0);
    rewards[r] = -(d * d);
  }
  return rewards;
}

double env_step(const Mlp& teacher, const Scaler& scaler, double state, std::span<const double> action) {
  if (scaler.fitted() && scaler.feature_count() != teacher.input_width()) {
    throw DimensionError("env: scaler and teacher widths differ");
  }
  return env_rewards(teacher, Matrix(1, 1, std::vector<double>{state}),
                     Matrix(1, action.size(), std::vector<double>(action.begin(), action.end())))[0];
}

std::vector<double> critic_targets(const TransitionBatch& batch) {
  for (bool t : batch.terminal) {
    if (!t) throw ContractError("critic_targets: non-terminal transition in a one-step environment");
  }
  return batch.rewards;
}

Td3Result td3_train(const Mlp& teacher, const Scaler& scaler, const Td3Config& cfg) {
  validate(cfg);
  check_teacher(teacher);
  if (!scaler.fitted()) throw ContractError("td3: scaler not fitted");
  if (scaler.feature_count() != teacher.input_width()) {
    throw DimensionError("td3: scaler has " + std::to_string(scaler.feature_count()) + " features, teacher expects " +
                         std::to_string(teacher.input_width()));
  }
  const std::string teacher_digest = teacher.digest();
  const std::size_t width = teacher.input_width();

  Td3Result res{Mlp::init({1, cfg.actor_hidden, width}, OutputMode::sigmoid, cfg.seed),
                Mlp::init({1 + width, cfg.critic_hidden, 1}, OutputMode::linear, cfg.seed + 1),
                Mlp::init({1 + width, cfg.critic_hidden, 1}, OutputMode::linear, cfg.seed + 2),
                {},
                0};
  // The critic targets never read these (every episode terminates), but
  // they are kept in step with the live networks as usual.
  Mlp target_actor = res.actor;
  Mlp target_critic1 = res.critic1;
  Mlp target_critic2 = res.critic2;
  AdamState actor_adam = AdamState::for_network(res.actor, AdamConfig{.lr = cfg.actor_lr});
  AdamState critic1_adam = AdamState::for_network(res.critic1, AdamConfig{.lr = cfg.critic_lr});
  AdamState critic2_adam = AdamState::for_network(res.critic2, AdamConfig{.lr = cfg.critic_lr});

  ReplayBuffer buffer(cfg.buffer_capacity, width);
  Rng env_rng(mix_seed(cfg.seed));
  Rng replay_rng(mix_seed(mix_seed(cfg.seed)));
  res.curve.points.reserve(cfg.total_steps);
  std::vector<double> raw;
  raw.reserve(cfg.total_steps);

  for (std::size_t step = 1; step <= cfg.total_steps; ++step) {
    try {
      const Matrix state = sample_targets(scaler, 1, env_rng);
      Matrix action(1, width);
      if (step <= cfg.warmup_steps) {
        for (double& a : action.values()) a = env_rng.uniform(-1.0, 1.0);
      } else {
        action = actor_actions(res.actor, state);
        for (double& a : action.values()) {
          a = std::clamp(a + cfg.exploration_noise_std * env_rng.normal(), -1.0, 1.0);
        }
      }
      const double reward = env_rewards(teacher, state, action)[0];
      const auto av = action.values();
      buffer.push({state(0, 0), std::vector<double>(av.begin(), av.end()), reward, true});
      raw.push_back(reward);

      const std::size_t from = raw.size() > cfg.smoothing_window ? raw.size() - cfg.smoothing_window : 0;
      double sum = 0.0;
      for (std::size_t i = from; i < raw.size(); ++i) sum += raw[i];
      res.curve.points.push_back({step, reward, sum / static_cast<double>(raw.size() - from)});

      if (step <= cfg.warmup_steps || buffer.size() < cfg.batch) continue;
      const TransitionBatch batch = buffer.sample(cfg.batch, replay_rng);
      const Matrix target = Matrix::column(critic_targets(batch));
      const Matrix input = state_action(batch.states, batch.actions);
      fit_critic(res.critic1, critic1_adam, input, target);
      fit_critic(res.critic2, critic2_adam, input, target);
      ++res.critic_updates;
      if (res.critic_updates % cfg.policy_delay == 0) {
        fit_actor(res.actor, actor_adam, res.critic1, batch.states);
        soft_update(target_actor, res.actor, cfg.tau);
        soft_update(target_critic1, res.critic1, cfg.tau);
        soft_update(target_critic2, res.critic2, cfg.tau);
      }
    } catch (const NonFiniteError& e) {
      throw NonFiniteError("td3 aborted at step " + std::to_string(step) + ": " + e.what());
    }
  }
  if (teacher.digest() != teacher_digest) throw ContractError("td3: teacher parameters changed during training");
  return res;
}

InverseModel actor_inverse(const Mlp& actor) {
  return [&actor](const Matrix& y) { return map_action(actor_actions(actor, y)); };
}

}  // namespace hardinv
