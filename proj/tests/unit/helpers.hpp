#pragma once

#include <cstdint>

#include "hardinv/common/rng.hpp"
#include "hardinv/nncore/mlp.hpp"

namespace hardinv::testing {

// Random weights from init() plus nonzero random biases, so every code path
// (including negative ELU inputs) is exercised.
inline Mlp random_net(MlpShape shape, OutputMode mode, std::uint64_t seed) {
  Mlp net = Mlp::init(shape, mode, seed);
  Rng rng(seed ^ 0xb1a5ULL);
  for (LinearLayer& l : net.mutable_layers()) {
    for (double& b : l.bias) b = rng.uniform(-0.5, 0.5);
  }
  return net;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  Rng rng(seed);
  for (double& v : m.values()) v = rng.uniform(lo, hi);
  return m;
}

// proj = 1, hidden blocks zero, head = 1: y = x through the skip connections.
inline Mlp identity_net() {
  Mlp net({1, 1, 1}, OutputMode::linear);
  const auto layers = net.mutable_layers();
  layers[0].weight(0, 0) = 1.0;
  layers[Mlp::kLayerCount - 1].weight(0, 0) = 1.0;
  return net;
}

}  // namespace hardinv::testing
