#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hardinv/nncore/matrix.hpp"

namespace hardinv {

/// Tabular samples: one feature row and one scalar target per sample.
struct Dataset {
  Matrix features;
  std::vector<double> targets;
  bool normalized = false;

  std::size_t size() const { return targets.size(); }
  std::size_t feature_count() const { return features.cols(); }

  /// Targets as an N x 1 matrix.
  Matrix target_matrix() const { return Matrix::column(targets); }
  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Shape and finiteness checks for any dataset.
void validate_dataset(const Dataset& ds);
/// Physical range checks for a raw steel dataset (13 schema columns):
/// positive tempering time, non-negative composition, hardness in [0, 70].
/// Throws IngestError naming the 1-based row and the column.
void validate_raw_steel(const Dataset& ds);

/// Seeded shuffle then partition. The test part holds round(N * fraction)
/// rows, clamped so that both parts are non-empty.
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed);

}  // namespace hardinv
