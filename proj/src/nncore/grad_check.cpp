#include "hardinv/nncore/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "hardinv/nncore/loss.hpp"

namespace hardinv {

namespace {

double loss_value(const Matrix& y, CheckLoss kind) {
  double s = 0.0;
  for (double v : y.values()) s += kind == CheckLoss::sum ? v : v * v;
  return kind == CheckLoss::sum ? s : s / static_cast<double>(y.size());
}

Matrix loss_grad(const Matrix& y, CheckLoss kind) {
  if (kind == CheckLoss::sum) return Matrix(y.rows(), y.cols(), 1.0);
  return mse(y, Matrix(y.rows(), y.cols())).grad;
}

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / scale;
}

double central_difference(double& slot, double step, const std::function<double()>& eval) {
  const double saved = slot;
  slot = saved + step;
  const double plus = eval();
  slot = saved - step;
  const double minus = eval();
  slot = saved;
  return (plus - minus) / (2.0 * step);
}

}  // namespace

double grad_check(const Mlp& net, const Matrix& x, CheckLoss loss, double step) {
  // Work on an unfrozen copy so parameters can be perturbed.
  Mlp probe(net.shape(), net.output_mode());
  {
    const auto layers = probe.mutable_layers();
    for (std::size_t l = 0; l < Mlp::kLayerCount; ++l) layers[l] = net.layer(l);
  }
  const ForwardResult fwd = forward(probe, x);
  const GradientTape tape = backward(probe, fwd.cache, loss_grad(fwd.output, loss));

  double worst = 0.0;
  Matrix input = x;
  const auto eval = [&] { return loss_value(predict(probe, input), loss); };

  // Parameters are perturbed in place; the span stays valid because the
  // layers never reallocate.
  const auto layers = probe.mutable_layers();
  for (std::size_t l = 0; l < Mlp::kLayerCount; ++l) {
    auto w = layers[l].weight.values();
    const auto gw = tape.layers[l].weight.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      worst = std::max(worst, relative_error(gw[i], central_difference(w[i], step, eval)));
    }
    for (std::size_t i = 0; i < layers[l].bias.size(); ++i) {
      worst = std::max(worst,
                       relative_error(tape.layers[l].bias[i], central_difference(layers[l].bias[i], step, eval)));
    }
  }
  auto xv = input.values();
  const auto gx = tape.input_grad.values();
  for (std::size_t i = 0; i < xv.size(); ++i) {
    worst = std::max(worst, relative_error(gx[i], central_difference(xv[i], step, eval)));
  }
  return worst;
}

}  // namespace hardinv
