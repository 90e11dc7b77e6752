#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardinv/nncore/matrix.hpp"

namespace hardinv {

enum class OutputMode { linear, sigmoid };

std::string_view to_string(OutputMode mode);
/// Throws ContractError for anything other than "linear" or "sigmoid".
OutputMode parse_output_mode(std::string_view text);

/// ELU with alpha = 1.
double elu(double x);

/// Dense layer y = x W^T + b, with W stored out x in.
struct LinearLayer {
  Matrix weight;
  std::vector<double> bias;

  std::size_t in_width() const { return weight.cols(); }
  std::size_t out_width() const { return weight.rows(); }

  friend bool operator==(const LinearLayer&, const LinearLayer&) = default;
};

struct MlpShape {
  std::size_t input = 0;
  std::size_t hidden = 0;
  std::size_t output = 0;

  friend bool operator==(const MlpShape&, const MlpShape&) = default;
};

/// Residual-ELU perceptron: an input projection to the hidden width, three
/// equal-width blocks z -> z + elu(L z), and a head with a linear or
/// logistic output.
///
/// Parameter mutation goes through mutable_layers(), which bumps a revision
/// counter (so stale forward caches are detected) and refuses to hand out
/// the parameters once the network has been frozen.
class Mlp {
 public:
  static constexpr std::size_t kResidualBlocks = 3;
  static constexpr std::size_t kLayerCount = kResidualBlocks + 2;

  /// All weights and biases zero.
  Mlp(MlpShape shape, OutputMode mode);

  /// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
  static Mlp init(MlpShape shape, OutputMode mode, std::uint64_t seed);

  const MlpShape& shape() const { return shape_; }
  OutputMode output_mode() const { return mode_; }
  std::size_t input_width() const { return shape_.input; }
  std::size_t output_width() const { return shape_.output; }

  /// Layer order: input projection, the residual blocks, head.
  std::span<const LinearLayer> layers() const { return layers_; }
  const LinearLayer& layer(std::size_t i) const { return layers_.at(i); }
  std::span<LinearLayer> mutable_layers();

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  std::uint64_t revision() const { return revision_; }

  std::size_t parameter_count() const;
  /// FNV-1a over every parameter's bytes, in layer order, weight then bias.
  std::string digest() const;

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.shape_ == b.shape_ && a.mode_ == b.mode_ && a.layers_ == b.layers_;
  }

 private:
  MlpShape shape_;
  OutputMode mode_;
  std::array<LinearLayer, kLayerCount> layers_;
  bool frozen_ = false;
  std::uint64_t revision_ = 0;
};

std::string_view layer_name(std::size_t index);

/// Activations kept by forward() for the matching backward() call.
struct ForwardCache {
  const Mlp* net = nullptr;
  std::uint64_t revision = 0;
  Matrix input;
  std::array<Matrix, Mlp::kResidualBlocks + 1> states;     // block inputs/outputs
  std::array<Matrix, Mlp::kResidualBlocks> activations;    // elu(L z) per block
  Matrix output;
};

struct ForwardResult {
  Matrix output;
  ForwardCache cache;
};

/// Gradients of a scalar loss with respect to every parameter and the input.
struct GradientTape {
  std::array<LinearLayer, Mlp::kLayerCount> layers;
  Matrix input_grad;
};

ForwardResult forward(const Mlp& net, const Matrix& x);
/// forward() without keeping the cache.
Matrix predict(const Mlp& net, const Matrix& x);

GradientTape backward(const Mlp& net, const ForwardCache& cache, const Matrix& grad_output);
/// Only dL/dx; parameter gradients are skipped. Used to push gradients
/// through a frozen network.
Matrix input_gradient(const Mlp& net, const ForwardCache& cache, const Matrix& grad_output);

/// Zero-valued tape with the parameter shapes of `net`.
GradientTape zero_tape(const Mlp& net);

/// target <- tau * source + (1 - tau) * target, parameter-wise.
void soft_update(Mlp& target, const Mlp& source, double tau);
/// Euclidean norm of the parameter difference.
double parameter_distance(const Mlp& a, const Mlp& b);

/// Name of the first layer holding a non-finite parameter, or empty.
std::string first_non_finite_layer(const Mlp& net);

}  // namespace hardinv
