#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hardinv/data/dataset.hpp"
#include "hardinv/data/scaler.hpp"
#include "hardinv/eval/metrics.hpp"
#include "hardinv/nncore/mlp.hpp"

namespace hardinv {

/// An inverse model: normalized targets (N x 1) -> normalized features (N x F).
using InverseModel = std::function<Matrix(const Matrix&)>;

InverseModel mlp_inverse(const Mlp& net);

/// Pushes the model's answer for each raw target through the teacher and
/// scores the teacher output against the target in raw HRC.
MetricSet functional_eval(const InverseModel& model, const Mlp& teacher, const Scaler& scaler,
                          std::span<const double> raw_targets, SplitName split = SplitName::test);

/// Scores the predicted features against the dataset's own features, in raw
/// units, averaged over the feature columns.
MetricSet input_space_eval(const InverseModel& model, const Scaler& scaler, const Dataset& raw,
                           SplitName split = SplitName::test);

/// `n` raw targets drawn uniformly over the scaler's target range.
std::vector<double> uniform_targets(const Scaler& scaler, std::size_t n, std::uint64_t seed);

}  // namespace hardinv
