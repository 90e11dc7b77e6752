#pragma once

#include <array>
#include <cstdint>

#include "hardinv/nncore/mlp.hpp"

namespace hardinv {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment accumulators mirror the parameter shapes of the network they
/// were created for.
struct AdamState {
  AdamConfig config;
  std::array<LinearLayer, Mlp::kLayerCount> first_moment;
  std::array<LinearLayer, Mlp::kLayerCount> second_moment;
  std::uint64_t step_count = 0;

  static AdamState for_network(const Mlp& net, AdamConfig config = {});
};

/// One bias-corrected Adam update of every parameter of `net`.
void adam_step(Mlp& net, const GradientTape& tape, AdamState& state);

}  // namespace hardinv
