#include "hardinv/nncore/mlp.hpp"

#include <cmath>
#include <limits>

#include "hardinv/common/errors.hpp"
#include "hardinv/common/json_io.hpp"
#include "hardinv/common/rng.hpp"

namespace hardinv {

namespace {

constexpr std::size_t kHeadIndex = Mlp::kLayerCount - 1;

LinearLayer zero_layer(std::size_t in, std::size_t out) {
  return LinearLayer{Matrix(out, in), std::vector<double>(out, 0.0)};
}

// y = x W^T + b. Each output entry starts at its bias and accumulates the
// products in increasing input index, so an entry's value does not depend on
// the batch it is computed in.
Matrix affine(const Matrix& x, const LinearLayer& layer) {
  const std::size_t batch = x.rows();
  const std::size_t in = layer.in_width();
  const std::size_t out = layer.out_width();
  if (x.cols() != in) {
    throw DimensionError("affine: input has " + std::to_string(x.cols()) + " columns, layer expects " +
                         std::to_string(in));
  }
  std::vector<double> wt(in * out);
  for (std::size_t j = 0; j < out; ++j) {
    for (std::size_t k = 0; k < in; ++k) wt[k * out + j] = layer.weight(j, k);
  }
  Matrix y(batch, out);
  const double* bias = layer.bias.data();
  for (std::size_t i = 0; i < batch; ++i) {
    double* __restrict yi = y.data() + i * out;
    const double* xi = x.data() + i * in;
    for (std::size_t j = 0; j < out; ++j) yi[j] = bias[j];
    for (std::size_t k = 0; k < in; ++k) {
      const double a = xi[k];
      const double* __restrict wk = wt.data() + k * out;
      for (std::size_t j = 0; j < out; ++j) yi[j] += a * wk[j];
    }
  }
  return y;
}

// grad.weight += dz^T a, grad.bias += column sums of dz (batch order).
void accumulate_param_grads(const Matrix& a, const Matrix& dz, LinearLayer& grad) {
  const std::size_t batch = a.rows();
  const std::size_t in = a.cols();
  const std::size_t out = dz.cols();
  for (std::size_t i = 0; i < batch; ++i) {
    const double* __restrict ai = a.data() + i * in;
    const double* dzi = dz.data() + i * out;
    for (std::size_t j = 0; j < out; ++j) {
      const double g = dzi[j];
      double* __restrict wj = grad.weight.data() + j * in;
      for (std::size_t k = 0; k < in; ++k) wj[k] += g * ai[k];
      grad.bias[j] += g;
    }
  }
}

// dx = dz W.
Matrix backprop_input(const Matrix& dz, const LinearLayer& layer) {
  const std::size_t batch = dz.rows();
  const std::size_t in = layer.in_width();
  const std::size_t out = layer.out_width();
  Matrix dx(batch, in);
  for (std::size_t i = 0; i < batch; ++i) {
    double* __restrict dxi = dx.data() + i * in;
    const double* dzi = dz.data() + i * out;
    for (std::size_t j = 0; j < out; ++j) {
      const double g = dzi[j];
      const double* __restrict wj = layer.weight.data() + j * in;
      for (std::size_t k = 0; k < in; ++k) dxi[k] += g * wj[k];
    }
  }
  return dx;
}

double sigmoid(double h) {
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - 0x1.0p-53;
  const double y = h >= 0.0 ? 1.0 / (1.0 + std::exp(-h)) : std::exp(h) / (1.0 + std::exp(h));
  // Keep the output inside the open interval even when exp saturates.
  return std::min(std::max(y, kLow), kHigh);
}

void check_layer_output(const Matrix& m, std::size_t layer) {
  if (!m.all_finite()) {
    throw NonFiniteError("forward: non-finite activation after layer " + std::string(layer_name(layer)));
  }
}

void check_cache(const Mlp& net, const ForwardCache& cache, const Matrix& grad_output) {
  if (cache.net != &net || cache.revision != net.revision()) {
    throw ContractError("backward: forward cache does not belong to this network state");
  }
  require_same_shape(cache.output, grad_output, "backward: grad_output");
}

// Gradient wrt the head's pre-activation.
Matrix head_grad(const Mlp& net, const ForwardCache& cache, const Matrix& grad_output) {
  Matrix dh = grad_output;
  if (net.output_mode() == OutputMode::sigmoid) {
    auto d = dh.values();
    const auto y = cache.output.values();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= y[i] * (1.0 - y[i]);
  }
  return dh;
}

// du = dz * elu'(u), with elu'(u) recovered from a = elu(u): 1 when a > 0, else a + 1.
Matrix block_preactivation_grad(const Matrix& dz, const Matrix& activation) {
  Matrix du = dz;
  auto d = du.values();
  const auto a = activation.values();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(a[i] > 0.0)) d[i] *= a[i] + 1.0;
  }
  return du;
}

template <bool kParams>
Matrix run_backward(const Mlp& net, const ForwardCache& cache, const Matrix& grad_output,
                    GradientTape* tape) {
  check_cache(net, cache, grad_output);
  const auto layers = net.layers();
  const Matrix dh = head_grad(net, cache, grad_output);
  if constexpr (kParams) accumulate_param_grads(cache.states[Mlp::kResidualBlocks], dh, tape->layers[kHeadIndex]);
  Matrix dz = backprop_input(dh, layers[kHeadIndex]);
  for (std::size_t b = Mlp::kResidualBlocks; b-- > 0;) {
    const Matrix du = block_preactivation_grad(dz, cache.activations[b]);
    if constexpr (kParams) accumulate_param_grads(cache.states[b], du, tape->layers[b + 1]);
    const Matrix through = backprop_input(du, layers[b + 1]);
    auto d = dz.values();
    const auto t = through.values();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += t[i];
  }
  if constexpr (kParams) accumulate_param_grads(cache.input, dz, tape->layers[0]);
  return backprop_input(dz, layers[0]);
}

}  // namespace

std::string_view to_string(OutputMode mode) {
  return mode == OutputMode::linear ? "linear" : "sigmoid";
}

OutputMode parse_output_mode(std::string_view text) {
  if (text == "linear") return OutputMode::linear;
  if (text == "sigmoid") return OutputMode::sigmoid;
  throw ContractError("unknown output mode '" + std::string(text) + "'");
}

double elu(double x) { return x > 0.0 ? x : std::expm1(x); }

std::string_view layer_name(std::size_t index) {
  static constexpr std::array<std::string_view, Mlp::kLayerCount> kNames = {
      "input_proj", "hidden1", "hidden2", "hidden3", "head"};
  return index < kNames.size() ? kNames[index] : std::string_view("?");
}

Mlp::Mlp(MlpShape shape, OutputMode mode) : shape_(shape), mode_(mode) {
  if (shape.input == 0 || shape.hidden == 0 || shape.output == 0) {
    throw ContractError("Mlp: widths must be positive");
  }
  layers_[0] = zero_layer(shape.input, shape.hidden);
  for (std::size_t b = 1; b <= kResidualBlocks; ++b) layers_[b] = zero_layer(shape.hidden, shape.hidden);
  layers_[kHeadIndex] = zero_layer(shape.hidden, shape.output);
}

Mlp Mlp::init(MlpShape shape, OutputMode mode, std::uint64_t seed) {
  Mlp net(shape, mode);
  Rng rng(seed);
  for (LinearLayer& layer : net.layers_) {
    const double limit = 1.0 / std::sqrt(static_cast<double>(layer.in_width()));
    for (double& w : layer.weight.values()) w = rng.uniform(-limit, limit);
  }
  return net;
}

std::span<LinearLayer> Mlp::mutable_layers() {
  if (frozen_) throw ContractError("Mlp: parameters of a frozen network cannot be modified");
  ++revision_;
  return layers_;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const LinearLayer& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

std::string Mlp::digest() const {
  Fnv1a h;
  for (const LinearLayer& l : layers_) {
    h.update(l.weight.values());
    h.update(std::span<const double>(l.bias));
  }
  return h.hex();
}

ForwardResult forward(const Mlp& net, const Matrix& x) {
  if (x.cols() != net.input_width()) {
    throw DimensionError("forward: input has " + std::to_string(x.cols()) + " columns, network expects " +
                         std::to_string(net.input_width()));
  }
  x.require_finite("forward input");
  const auto layers = net.layers();
  ForwardResult r;
  r.cache.net = &net;
  r.cache.revision = net.revision();
  r.cache.input = x;
  r.cache.states[0] = affine(x, layers[0]);
  check_layer_output(r.cache.states[0], 0);
  for (std::size_t b = 0; b < Mlp::kResidualBlocks; ++b) {
    Matrix a = affine(r.cache.states[b], layers[b + 1]);
    for (double& v : a.values()) v = elu(v);
    check_layer_output(a, b + 1);
    Matrix z = r.cache.states[b];
    auto zv = z.values();
    const auto av = a.values();
    for (std::size_t i = 0; i < zv.size(); ++i) zv[i] += av[i];
    r.cache.activations[b] = std::move(a);
    r.cache.states[b + 1] = std::move(z);
  }
  Matrix y = affine(r.cache.states[Mlp::kResidualBlocks], layers[kHeadIndex]);
  if (net.output_mode() == OutputMode::sigmoid) {
    for (double& v : y.values()) v = sigmoid(v);
  }
  check_layer_output(y, kHeadIndex);
  r.cache.output = y;
  r.output = std::move(y);
  return r;
}

Matrix predict(const Mlp& net, const Matrix& x) { return forward(net, x).output; }

GradientTape zero_tape(const Mlp& net) {
  GradientTape tape;
  const auto layers = net.layers();
  for (std::size_t i = 0; i < Mlp::kLayerCount; ++i) {
    tape.layers[i] = zero_layer(layers[i].in_width(), layers[i].out_width());
  }
  return tape;
}

GradientTape backward(const Mlp& net, const ForwardCache& cache, const Matrix& grad_output) {
  GradientTape tape = zero_tape(net);
  tape.input_grad = run_backward<true>(net, cache, grad_output, &tape);
  return tape;
}

Matrix input_gradient(const Mlp& net, const ForwardCache& cache, const Matrix& grad_output) {
  return run_backward<false>(net, cache, grad_output, nullptr);
}

void soft_update(Mlp& target, const Mlp& source, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ContractError("soft_update: tau must lie in (0, 1]");
  if (target.shape() != source.shape()) throw DimensionError("soft_update: shape mismatch");
  const auto src = source.layers();
  const auto dst = target.mutable_layers();
  for (std::size_t l = 0; l < Mlp::kLayerCount; ++l) {
    auto tw = dst[l].weight.values();
    const auto sw = src[l].weight.values();
    for (std::size_t i = 0; i < tw.size(); ++i) tw[i] = tau * sw[i] + (1.0 - tau) * tw[i];
    for (std::size_t i = 0; i < dst[l].bias.size(); ++i) {
      dst[l].bias[i] = tau * src[l].bias[i] + (1.0 - tau) * dst[l].bias[i];
    }
  }
}

double parameter_distance(const Mlp& a, const Mlp& b) {
  if (a.shape() != b.shape()) throw DimensionError("parameter_distance: shape mismatch");
  double sum = 0.0;
  for (std::size_t l = 0; l < Mlp::kLayerCount; ++l) {
    const auto wa = a.layer(l).weight.values();
    const auto wb = b.layer(l).weight.values();
    for (std::size_t i = 0; i < wa.size(); ++i) sum += (wa[i] - wb[i]) * (wa[i] - wb[i]);
    const auto& ba = a.layer(l).bias;
    const auto& bb = b.layer(l).bias;
    for (std::size_t i = 0; i < ba.size(); ++i) sum += (ba[i] - bb[i]) * (ba[i] - bb[i]);
  }
  return std::sqrt(sum);
}

std::string first_non_finite_layer(const Mlp& net) {
  for (std::size_t l = 0; l < Mlp::kLayerCount; ++l) {
    const LinearLayer& layer = net.layer(l);
    bool ok = layer.weight.all_finite();
    for (double v : layer.bias) ok = ok && std::isfinite(v);
    if (!ok) return std::string(layer_name(l));
  }
  return {};
}

}  // namespace hardinv
