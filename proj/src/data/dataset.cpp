#include "hardinv/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hardinv/common/errors.hpp"
#include "hardinv/common/rng.hpp"
#include "hardinv/data/schema.hpp"

namespace hardinv {

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = features.gather_rows(rows);
  out.targets.reserve(rows.size());
  for (std::size_t r : rows) out.targets.push_back(targets.at(r));
  out.normalized = normalized;
  return out;
}

void validate_dataset(const Dataset& ds) {
  if (ds.size() == 0) throw IngestError("empty dataset");
  if (ds.features.rows() != ds.targets.size()) {
    throw DimensionError("dataset: " + std::to_string(ds.features.rows()) + " feature rows but " +
                         std::to_string(ds.targets.size()) + " targets");
  }
  ds.features.require_finite("dataset features");
  for (std::size_t i = 0; i < ds.targets.size(); ++i) {
    if (!std::isfinite(ds.targets[i])) {
      throw NonFiniteError("dataset: non-finite target at row " + std::to_string(i + 1));
    }
  }
}

void validate_raw_steel(const Dataset& ds) {
  validate_dataset(ds);
  if (ds.feature_count() != kFeatureCount) {
    throw SchemaError("dataset: expected " + std::to_string(kFeatureCount) + " feature columns, got " +
                      std::to_string(ds.feature_count()));
  }
  const auto fail = [](std::size_t row, std::string_view col, const std::string& why) {
    throw IngestError("row " + std::to_string(row + 1) + ", column " + std::string(col) + ": " + why);
  };
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (!(ds.features(r, kTimeColumn) > 0.0)) fail(r, kFeatureNames[kTimeColumn], "tempering time must be > 0");
    for (std::size_t c = kFirstElementColumn; c < kFeatureCount; ++c) {
      if (ds.features(r, c) < 0.0) fail(r, kFeatureNames[c], "composition percentage must be >= 0");
    }
    if (ds.targets[r] < kMinHardness || ds.targets[r] > kMaxHardness) {
      fail(r, kTargetName, "hardness outside [0, 70] HRC");
    }
  }
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ContractError("split: test fraction must lie in (0, 1)");
  }
  const std::size_t n = ds.size();
  if (n < 2) throw ContractError("split: need at least 2 rows");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  const std::span<const std::size_t> all(order);
  return {ds.subset(all.subspan(n_test)), ds.subset(all.first(n_test))};
}

}  // namespace hardinv
