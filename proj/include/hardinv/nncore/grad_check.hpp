#pragma once

#include "hardinv/nncore/mlp.hpp"

namespace hardinv {

enum class CheckLoss {
  mean_square,  // L = mean(y^2), i.e. MSE against a zero target
  sum,          // L = sum(y)
};

/// Largest relative disagreement between backward() and central finite
/// differences, over every parameter and every input entry:
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
double grad_check(const Mlp& net, const Matrix& x, CheckLoss loss = CheckLoss::mean_square, double step = 1e-5);

}  // namespace hardinv
