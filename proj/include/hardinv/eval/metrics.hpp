#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "hardinv/nncore/matrix.hpp"

namespace hardinv {

enum class Protocol { input_space, functional };
enum class SplitName { train, test };

std::string_view to_string(Protocol p);
std::string_view to_string(SplitName s);
Protocol parse_protocol(std::string_view text);
SplitName parse_split(std::string_view text);

struct MetricSet {
  double mse = 0.0;
  double mae = 0.0;
  /// Absent when undefined (constant truth, or fewer than two samples).
  std::optional<double> r2;
  std::size_t n = 0;
  Protocol protocol = Protocol::functional;
  SplitName split = SplitName::test;

  friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

/// 1 - SS_res / SS_tot. Throws UndefinedMetricError when truth is constant
/// and DimensionError for mismatched or too short inputs.
double r2(std::span<const double> pred, std::span<const double> truth);
double mean_squared_error(std::span<const double> pred, std::span<const double> truth);
double mean_absolute_error(std::span<const double> pred, std::span<const double> truth);

MetricSet scalar_metrics(std::span<const double> pred, std::span<const double> truth, Protocol protocol,
                         SplitName split);

/// Per-column metrics averaged uniformly over columns. r2 is averaged over
/// the columns where it is defined.
MetricSet column_metrics(const Matrix& pred, const Matrix& truth, Protocol protocol, SplitName split);

}  // namespace hardinv
