#pragma once

#include "hardinv/baselines/forest.hpp"
#include "hardinv/data/dataset.hpp"
#include "hardinv/training/trainer.hpp"

namespace hardinv {

/// The inverted dataset view: hardness (N x 1) as input, features as target.
struct InverseData {
  Matrix input;
  Matrix target;
};
InverseData invert(const Dataset& normalized);

/// Plain supervised inverse MLP, hardness -> features, on normalized data.
/// Linear head; the curve holds both losses every eval_every epochs.
FitResult train_direct_inverse(const Dataset& train, const Dataset& val, const TrainConfig& cfg);

/// Forest on the inverted normalized training set.
Forest train_forest_inverse(const Dataset& train, const ForestParams& params);

}  // namespace hardinv
