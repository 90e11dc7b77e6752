#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hardinv/data/scaler.hpp"
#include "hardinv/eval/protocols.hpp"
#include "hardinv/nncore/mlp.hpp"
#include "hardinv/rl/replay_buffer.hpp"

namespace hardinv {

struct Td3Config {
  std::size_t total_steps = 40000;
  std::size_t warmup_steps = 1000;  // uniform random actions
  std::size_t batch = 256;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  double tau = 0.005;
  std::size_t policy_delay = 2;
  double exploration_noise_std = 0.1;
  double target_noise_std = 0.2;
  double target_noise_clip = 0.5;
  std::uint64_t seed = 0;
  std::size_t actor_hidden = 64;
  std::size_t critic_hidden = 64;
  std::size_t buffer_capacity = 100000;
  std::size_t smoothing_window = 100;
};

struct RewardPoint {
  std::size_t step = 0;
  double raw = 0.0;
  double smoothed = 0.0;

  friend bool operator==(const RewardPoint&, const RewardPoint&) = default;
};

struct RewardCurve {
  std::vector<RewardPoint> points;

  /// `step,raw_reward,smoothed_reward`, with an optional digest comment line.
  std::string to_csv(const std::string& config_digest = {}) const;
  friend bool operator==(const RewardCurve&, const RewardCurve&) = default;
};

struct Td3Result {
  Mlp actor;
  Mlp critic1;
  Mlp critic2;
  RewardCurve curve;
  std::size_t critic_updates = 0;
};

/// Action box [-1, 1] -> normalized feature box [0, 1].
Matrix map_action(const Matrix& action);

/// Bounded actor head: 2 * sigmoid - 1.
Matrix actor_actions(const Mlp& actor, const Matrix& states);

/// Rewards of a batch of one-step episodes: -(teacher(map(a)) - y)^2 with y
/// the normalized target in `states`.
std::vector<double> env_rewards(const Mlp& teacher, const Matrix& states, const Matrix& actions);
double env_step(const Mlp& teacher, const Scaler& scaler, double state, std::span<const double> action);

/// Critic regression targets. Every transition is terminal, so the target
/// is the reward itself.
std::vector<double> critic_targets(const TransitionBatch& batch);

/// TD3 against the frozen teacher as a one-step environment. The teacher
/// digest is compared before and after.
Td3Result td3_train(const Mlp& teacher, const Scaler& scaler, const Td3Config& cfg);

InverseModel actor_inverse(const Mlp& actor);

}  // namespace hardinv
