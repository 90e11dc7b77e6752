#include "hardinv/nncore/adam.hpp"

#include <cmath>

#include "hardinv/common/errors.hpp"

namespace hardinv {

namespace {

void require_mirrors(const LinearLayer& a, const LinearLayer& b, const char* what) {
  if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols() ||
      a.bias.size() != b.bias.size()) {
    throw DimensionError(std::string("adam_step: ") + what + " does not mirror the parameters");
  }
}

void update(std::span<double> theta, std::span<const double> g, std::span<double> m, std::span<double> v,
            const AdamConfig& c, double correction1, double correction2) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    theta[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

}  // namespace

AdamState AdamState::for_network(const Mlp& net, AdamConfig config) {
  if (!(config.lr > 0.0)) throw ContractError("Adam: learning rate must be positive");
  AdamState s;
  s.config = config;
  const GradientTape zeros = zero_tape(net);
  s.first_moment = zeros.layers;
  s.second_moment = zeros.layers;
  return s;
}

void adam_step(Mlp& net, const GradientTape& tape, AdamState& state) {
  const AdamConfig& c = state.config;
  if (!(c.lr > 0.0)) throw ContractError("Adam: learning rate must be positive");
  for (std::size_t l = 0; l < Mlp::kLayerCount; ++l) {
    require_mirrors(net.layer(l), tape.layers[l], "gradient tape");
    require_mirrors(net.layer(l), state.first_moment[l], "first moment");
    require_mirrors(net.layer(l), state.second_moment[l], "second moment");
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  const auto layers = net.mutable_layers();
  for (std::size_t l = 0; l < Mlp::kLayerCount; ++l) {
    update(layers[l].weight.values(), tape.layers[l].weight.values(), state.first_moment[l].weight.values(),
           state.second_moment[l].weight.values(), c, correction1, correction2);
    update(layers[l].bias, tape.layers[l].bias, state.first_moment[l].bias, state.second_moment[l].bias, c,
           correction1, correction2);
  }
}

}  // namespace hardinv
