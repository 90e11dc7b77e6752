#include "hardinv/baselines/direct_inverse.hpp"

#include "hardinv/common/errors.hpp"

namespace hardinv {

InverseData invert(const Dataset& normalized) {
  if (!normalized.normalized) throw ContractError("invert: dataset must be normalized");
  validate_dataset(normalized);
  return {normalized.target_matrix(), normalized.features};
}

FitResult train_direct_inverse(const Dataset& train, const Dataset& val, const TrainConfig& cfg) {
  const InverseData tr = invert(train);
  const InverseData va = invert(val);
  if (tr.target.cols() != va.target.cols()) throw DimensionError("train_direct_inverse: feature counts differ");
  Mlp net = Mlp::init({1, cfg.hidden, tr.target.cols()}, OutputMode::linear, cfg.seed);
  LossCurve curve = fit_supervised(net, tr.input, tr.target, va.input, va.target, cfg);
  return {std::move(net), std::move(curve)};
}

Forest train_forest_inverse(const Dataset& train, const ForestParams& params) {
  const InverseData tr = invert(train);
  return fit_forest(tr.input, tr.target, params);
}

}  // namespace hardinv
