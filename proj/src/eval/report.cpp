#include "hardinv/eval/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <tuple>

#include "hardinv/common/errors.hpp"
#include "hardinv/common/json_io.hpp"

namespace hardinv {

namespace {

constexpr std::string_view kHeader = "model,protocol,split,mse,mae,r2,wall_time_s,seed";
constexpr std::string_view kDigestPrefix = "# config_digest=";

std::vector<std::string_view> fields_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

double number(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IngestError("report line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

ComparisonReport build_report(std::vector<ReportEntry> entries) {
  if (entries.empty()) throw ContractError("build_report: no entries");
  std::stable_sort(entries.begin(), entries.end(), [](const ReportEntry& a, const ReportEntry& b) {
    const int pa = a.metrics.protocol == Protocol::functional ? 0 : 1;
    const int pb = b.metrics.protocol == Protocol::functional ? 0 : 1;
    return std::tie(pa, a.metrics.mse, a.model) < std::tie(pb, b.metrics.mse, b.model);
  });
  return ComparisonReport{std::move(entries)};
}

std::string ComparisonReport::to_csv() const {
  std::string out;
  std::vector<std::string> digests;
  for (const ReportEntry& e : rows) {
    if (!e.config_digest.empty() && std::find(digests.begin(), digests.end(), e.config_digest) == digests.end()) {
      digests.push_back(e.config_digest);
    }
  }
  for (const std::string& d : digests) out += std::string(kDigestPrefix) + d + "\n";
  out += kHeader;
  out += '\n';
  for (const ReportEntry& e : rows) {
    const MetricSet& m = e.metrics;
    out += e.model + "," + std::string(to_string(m.protocol)) + "," + std::string(to_string(m.split)) + "," +
           format_double(m.mse) + "," + format_double(m.mae) + "," + (m.r2 ? format_double(*m.r2) : "") + "," +
           format_double(e.wall_time_s) + "," + std::to_string(e.seed) + "\n";
  }
  return out;
}

std::string ComparisonReport::to_table() const {
  const std::vector<std::string> head = {"Model", "Protocol", "MSE", "MAE", "R2", "Training Time (s)", "Seed"};
  std::vector<std::vector<std::string>> cells;
  for (const ReportEntry& e : rows) {
    const MetricSet& m = e.metrics;
    cells.push_back({e.model, std::string(to_string(m.protocol)), fixed(m.mse, 4), fixed(m.mae, 4),
                     m.r2 ? fixed(*m.r2, 4) : "n/a", fixed(e.wall_time_s, 2), std::to_string(e.seed)});
  }
  std::vector<std::size_t> width(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    width[c] = head[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  // Text columns left-aligned, numbers right-aligned.
  const auto line = [&](const std::vector<std::string>& row) {
    std::string out;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string pad(width[c] - row[c].size(), ' ');
      out += c < 2 ? row[c] + pad : pad + row[c];
      out += c + 1 < row.size() ? "  " : "\n";
    }
    return out;
  };
  std::string out = line(head);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
  for (const auto& row : cells) out += line(row);
  return out;
}

std::vector<ReportEntry> parse_report_csv(std::string_view text) {
  std::vector<ReportEntry> out;
  std::string digest;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.starts_with(kDigestPrefix)) {
      digest = std::string(line.substr(kDigestPrefix.size()));
      continue;
    }
    if (line.starts_with('#')) continue;
    if (!header_seen) {
      if (line != kHeader) throw IngestError("report: unexpected header '" + std::string(line) + "'");
      header_seen = true;
      continue;
    }
    const auto f = fields_of(line);
    if (f.size() != 8) throw IngestError("report line " + std::to_string(line_no) + ": expected 8 fields");
    ReportEntry e;
    e.model = std::string(f[0]);
    try {
      e.metrics.protocol = parse_protocol(f[1]);
      e.metrics.split = parse_split(f[2]);
    } catch (const ContractError& err) {
      throw IngestError("report line " + std::to_string(line_no) + ": " + err.what());
    }
    e.metrics.mse = number(f[3], line_no);
    e.metrics.mae = number(f[4], line_no);
    if (!f[5].empty()) e.metrics.r2 = number(f[5], line_no);
    e.wall_time_s = number(f[6], line_no);
    const auto res = std::from_chars(f[7].data(), f[7].data() + f[7].size(), e.seed);
    if (res.ec != std::errc() || res.ptr != f[7].data() + f[7].size()) {
      throw IngestError("report line " + std::to_string(line_no) + ": bad seed");
    }
    e.config_digest = digest;
    out.push_back(std::move(e));
  }
  if (!header_seen) throw IngestError("report: missing header");
  return out;
}

}  // namespace hardinv
