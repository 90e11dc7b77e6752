#include "hardinv/data/scaler.hpp"

#include <algorithm>
#include <cmath>

#include "hardinv/common/errors.hpp"
#include "hardinv/data/schema.hpp"

namespace hardinv {

namespace {

double scale(double v, double lo, double hi) { return hi == lo ? 0.5 : (v - lo) / (hi - lo); }
double unscale(double v, double lo, double hi) { return hi == lo ? lo : lo + v * (hi - lo); }

}  // namespace

Scaler Scaler::fit(const Dataset& raw, std::vector<std::string> feature_names) {
  validate_dataset(raw);
  if (raw.normalized) throw ContractError("Scaler::fit: dataset is already normalized");
  const std::size_t cols = raw.feature_count();
  if (feature_names.empty()) {
    for (std::size_t c = 0; c < cols; ++c) {
      feature_names.push_back(cols == kFeatureCount ? std::string(kFeatureNames[c]) : "x" + std::to_string(c));
    }
  }
  if (feature_names.size() != cols) throw DimensionError("Scaler::fit: one name per feature column required");
  Scaler s;
  s.fitted_ = true;
  s.feature_names_ = std::move(feature_names);
  s.target_name_ = std::string(kTargetName);
  s.feature_min_.assign(cols, 0.0);
  s.feature_max_.assign(cols, 0.0);
  for (std::size_t c = 0; c < cols; ++c) {
    double lo = raw.features(0, c);
    double hi = lo;
    for (std::size_t r = 1; r < raw.size(); ++r) {
      lo = std::min(lo, raw.features(r, c));
      hi = std::max(hi, raw.features(r, c));
    }
    s.feature_min_[c] = lo;
    s.feature_max_[c] = hi;
  }
  const auto [tlo, thi] = std::minmax_element(raw.targets.begin(), raw.targets.end());
  s.target_min_ = *tlo;
  s.target_max_ = *thi;
  return s;
}

void Scaler::require_fitted() const {
  if (!fitted_) throw ContractError("Scaler: not fitted");
}

void Scaler::require_width(std::size_t cols) const {
  require_fitted();
  if (cols != feature_count()) {
    throw DimensionError("Scaler: fitted on " + std::to_string(feature_count()) + " feature columns, got " +
                         std::to_string(cols));
  }
}

Matrix Scaler::transform_features(const Matrix& raw) const {
  require_width(raw.cols());
  Matrix out = raw;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = scale(row[c], feature_min_[c], feature_max_[c]);
  }
  return out;
}

Matrix Scaler::inverse_features(const Matrix& scaled) const {
  require_width(scaled.cols());
  Matrix out = scaled;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = unscale(row[c], feature_min_[c], feature_max_[c]);
  }
  return out;
}

double Scaler::transform_target(double raw) const {
  require_fitted();
  return scale(raw, target_min_, target_max_);
}

double Scaler::inverse_target(double scaled) const {
  require_fitted();
  return unscale(scaled, target_min_, target_max_);
}

std::vector<double> Scaler::transform_targets(std::span<const double> raw) const {
  std::vector<double> out;
  out.reserve(raw.size());
  for (double v : raw) out.push_back(transform_target(v));
  return out;
}

std::vector<double> Scaler::inverse_targets(std::span<const double> scaled) const {
  std::vector<double> out;
  out.reserve(scaled.size());
  for (double v : scaled) out.push_back(inverse_target(v));
  return out;
}

Dataset Scaler::transform(const Dataset& raw) const {
  if (raw.normalized) throw ContractError("Scaler::transform: dataset is already normalized");
  return Dataset{transform_features(raw.features), transform_targets(raw.targets), true};
}

Dataset Scaler::inverse_transform(const Dataset& scaled) const {
  if (!scaled.normalized) throw ContractError("Scaler::inverse_transform: dataset is not normalized");
  return Dataset{inverse_features(scaled.features), inverse_targets(scaled.targets), false};
}

void Scaler::require_steel_schema() const {
  require_fitted();
  for (std::size_t c = 0; c < std::max(feature_names_.size(), kFeatureCount); ++c) {
    const std::string have = c < feature_names_.size() ? feature_names_[c] : "<missing>";
    const std::string want = c < kFeatureCount ? std::string(kFeatureNames[c]) : "<none>";
    if (have != want) {
      throw SchemaError("scaler column " + std::to_string(c) + " is '" + have + "' but the dataset schema has '" +
                        want + "'");
    }
  }
  if (target_name_ != kTargetName) {
    throw SchemaError("scaler target column is '" + target_name_ + "' but the dataset schema has '" +
                      std::string(kTargetName) + "'");
  }
}

Json Scaler::to_json() const {
  require_fitted();
  std::vector<std::string> columns = feature_names_;
  columns.push_back(target_name_);
  std::vector<double> lo = feature_min_;
  std::vector<double> hi = feature_max_;
  lo.push_back(target_min_);
  hi.push_back(target_max_);
  return Json{{"columns", columns}, {"min", lo}, {"max", hi}};
}

Scaler Scaler::from_json(const Json& doc) {
  try {
    auto columns = doc.at("columns").get<std::vector<std::string>>();
    const auto lo = doc.at("min").get<std::vector<double>>();
    const auto hi = doc.at("max").get<std::vector<double>>();
    if (columns.size() < 2 || lo.size() != columns.size() || hi.size() != columns.size()) {
      throw IngestError("scaler: columns, min and max must have equal length >= 2");
    }
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || hi[i] < lo[i]) {
        throw IngestError("scaler: invalid range for column '" + columns[i] + "'");
      }
    }
    Scaler s;
    s.fitted_ = true;
    s.target_name_ = columns.back();
    columns.pop_back();
    s.feature_names_ = std::move(columns);
    s.feature_min_.assign(lo.begin(), lo.end() - 1);
    s.feature_max_.assign(hi.begin(), hi.end() - 1);
    s.target_min_ = lo.back();
    s.target_max_ = hi.back();
    return s;
  } catch (const Json::exception& e) {
    throw IngestError(std::string("scaler: ") + e.what());
  }
}

Matrix sample_targets(const Scaler& scaler, std::size_t batch, Rng& stream) {
  if (!scaler.fitted()) throw ContractError("sample_targets: scaler not fitted");
  Matrix out(batch, 1);
  for (double& v : out.values()) v = stream.uniform();
  return out;
}

}  // namespace hardinv
