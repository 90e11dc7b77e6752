#include "hardinv/eval/protocols.hpp"

#include "hardinv/common/errors.hpp"
#include "hardinv/common/rng.hpp"

namespace hardinv {

namespace {

Matrix run_model(const InverseModel& model, const Scaler& scaler, std::span<const double> raw_targets) {
  if (!scaler.fitted()) throw ContractError("evaluation: scaler not fitted");
  if (raw_targets.empty()) throw DimensionError("evaluation: no targets");
  const Matrix y = Matrix::column(scaler.transform_targets(raw_targets));
  Matrix x = model(y);
  if (x.rows() != y.rows() || x.cols() != scaler.feature_count()) {
    throw DimensionError("evaluation: inverse model returned " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", scaler expects " + std::to_string(y.rows()) + "x" +
                         std::to_string(scaler.feature_count()));
  }
  x.require_finite("inverse model output");
  return x;
}

}  // namespace

InverseModel mlp_inverse(const Mlp& net) {
  return [&net](const Matrix& y) { return predict(net, y); };
}

MetricSet functional_eval(const InverseModel& model, const Mlp& teacher, const Scaler& scaler,
                          std::span<const double> raw_targets, SplitName split) {
  if (teacher.input_width() != scaler.feature_count() || teacher.output_width() != 1) {
    throw DimensionError("functional_eval: teacher is " + std::to_string(teacher.input_width()) + "->" +
                         std::to_string(teacher.output_width()) + ", scaler has " +
                         std::to_string(scaler.feature_count()) + " features");
  }
  const Matrix x = run_model(model, scaler, raw_targets);
  const std::vector<double> achieved = scaler.inverse_targets(predict(teacher, x).values());
  return scalar_metrics(achieved, raw_targets, Protocol::functional, split);
}

MetricSet input_space_eval(const InverseModel& model, const Scaler& scaler, const Dataset& raw,
                           SplitName split) {
  if (raw.normalized) throw ContractError("input_space_eval: expects a raw dataset");
  validate_dataset(raw);
  if (raw.feature_count() != scaler.feature_count()) {
    throw DimensionError("input_space_eval: dataset has " + std::to_string(raw.feature_count()) +
                         " features, scaler has " + std::to_string(scaler.feature_count()));
  }
  const Matrix x = scaler.inverse_features(run_model(model, scaler, raw.targets));
  return column_metrics(x, raw.features, Protocol::input_space, split);
}

std::vector<double> uniform_targets(const Scaler& scaler, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix y = sample_targets(scaler, n, rng);
  return scaler.inverse_targets(y.values());
}

}  // namespace hardinv
