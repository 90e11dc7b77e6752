#include "hardinv/nncore/loss.hpp"

#include <cmath>

#include "hardinv/common/errors.hpp"

namespace hardinv {

LossValue mse(const Matrix& pred, const Matrix& target) {
  require_same_shape(pred, target, "mse");
  if (pred.empty()) throw DimensionError("mse: empty input");
  const auto p = pred.values();
  const auto t = target.values();
  const double n = static_cast<double>(p.size());
  LossValue out{0.0, Matrix(pred.rows(), pred.cols())};
  auto g = out.grad.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - t[i];
    out.loss += d * d;
    g[i] = 2.0 * d / n;
  }
  out.loss /= n;
  if (!std::isfinite(out.loss)) throw NonFiniteError("mse: non-finite loss");
  return out;
}

}  // namespace hardinv
