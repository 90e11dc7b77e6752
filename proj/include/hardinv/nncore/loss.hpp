#pragma once

#include "hardinv/nncore/matrix.hpp"

namespace hardinv {

struct LossValue {
  double loss = 0.0;
  Matrix grad;  // dL/dpred
};

/// Mean over all entries of (pred - target)^2, with gradient 2 (pred - target) / N.
LossValue mse(const Matrix& pred, const Matrix& target);

}  // namespace hardinv
