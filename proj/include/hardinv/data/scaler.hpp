#pragma once

#include <string>
#include <vector>

#include "hardinv/common/json_io.hpp"
#include "hardinv/common/rng.hpp"
#include "hardinv/data/dataset.hpp"

namespace hardinv {

/// Per-column min-max scaling to [0, 1] for the features and the target.
/// A column whose min equals its max maps to the constant 0.5 and maps
/// back to that min.
class Scaler {
 public:
  Scaler() = default;

  /// Fits on a raw dataset. Column names default to the steel schema when
  /// there are 13 features, otherwise x0, x1, ...
  static Scaler fit(const Dataset& raw, std::vector<std::string> feature_names = {});

  bool fitted() const { return fitted_; }
  std::size_t feature_count() const { return feature_min_.size(); }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::string& target_name() const { return target_name_; }

  const std::vector<double>& feature_min() const { return feature_min_; }
  const std::vector<double>& feature_max() const { return feature_max_; }
  double target_min() const { return target_min_; }
  double target_max() const { return target_max_; }

  Matrix transform_features(const Matrix& raw) const;
  Matrix inverse_features(const Matrix& scaled) const;
  double transform_target(double raw) const;
  double inverse_target(double scaled) const;
  std::vector<double> transform_targets(std::span<const double> raw) const;
  std::vector<double> inverse_targets(std::span<const double> scaled) const;

  Dataset transform(const Dataset& raw) const;
  Dataset inverse_transform(const Dataset& scaled) const;

  /// Throws SchemaError naming the first column that differs from the
  /// steel schema.
  void require_steel_schema() const;

  Json to_json() const;
  static Scaler from_json(const Json& doc);

  friend bool operator==(const Scaler&, const Scaler&) = default;

 private:
  void require_fitted() const;
  void require_width(std::size_t cols) const;

  bool fitted_ = false;
  std::vector<std::string> feature_names_;
  std::string target_name_;
  std::vector<double> feature_min_;
  std::vector<double> feature_max_;
  double target_min_ = 0.0;
  double target_max_ = 0.0;
};

/// `batch` targets drawn uniformly from the normalized target range [0, 1].
Matrix sample_targets(const Scaler& scaler, std::size_t batch, Rng& stream);

}  // namespace hardinv
