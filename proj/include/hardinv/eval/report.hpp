#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hardinv/eval/metrics.hpp"

namespace hardinv {

struct ReportEntry {
  std::string model;
  MetricSet metrics;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
  std::string config_digest;

  friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

/// Functional rows first, then input-space rows; within each, ascending
/// mse with ties broken by model name.
struct ComparisonReport {
  std::vector<ReportEntry> rows;

  /// `model,protocol,split,mse,mae,r2,wall_time_s,seed`, preceded by one
  /// `# config_digest=` line per distinct digest. Undefined r2 is empty.
  std::string to_csv() const;
  std::string to_table() const;
};

ComparisonReport build_report(std::vector<ReportEntry> entries);

/// Reads rows written by ComparisonReport::to_csv; the digest of the
/// preceding comment line is attached to each row.
std::vector<ReportEntry> parse_report_csv(std::string_view text);

}  // namespace hardinv
