#include "hardinv/data/csv.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

#include "hardinv/common/errors.hpp"
#include "hardinv/common/json_io.hpp"
#include "hardinv/data/schema.hpp"

namespace hardinv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

Dataset parse_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (lines.empty() && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    // Comment lines, e.g. the config digest written by dataset_to_csv.
    if (!trim(line).starts_with('#')) lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw IngestError("missing header row");

  // Map schema column -> position in the file.
  constexpr std::size_t kColumns = kFeatureCount + 1;
  std::array<std::string_view, kColumns> names{};
  std::copy(kFeatureNames.begin(), kFeatureNames.end(), names.begin());
  names[kFeatureCount] = kTargetName;
  const auto header = split_fields(lines.front());
  std::array<std::size_t, kColumns> position{};
  position.fill(header.size());
  for (std::size_t h = 0; h < header.size(); ++h) {
    const auto it = std::find_if(names.begin(), names.end(),
                                 [&](std::string_view n) { return lower(n) == lower(header[h]); });
    if (it == names.end()) throw IngestError("unexpected column '" + std::string(header[h]) + "'");
    const auto col = static_cast<std::size_t>(it - names.begin());
    if (position[col] != header.size()) throw IngestError("duplicate column '" + std::string(header[h]) + "'");
    position[col] = h;
  }
  for (std::size_t c = 0; c < kColumns; ++c) {
    if (position[c] == header.size()) throw IngestError("missing column '" + std::string(names[c]) + "'");
  }

  const std::size_t n = lines.size() - 1;
  if (n == 0) throw IngestError("empty dataset");
  std::vector<double> features;
  features.reserve(n * kFeatureCount);
  std::vector<double> targets;
  targets.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto fields = split_fields(lines[r + 1]);
    if (fields.size() != header.size()) {
      throw IngestError("row " + std::to_string(r + 1) + ": expected " + std::to_string(header.size()) +
                        " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < kColumns; ++c) {
      const auto v = parse_number(fields[position[c]]);
      if (!v || !std::isfinite(*v)) {
        throw IngestError("row " + std::to_string(r + 1) + ", column " + std::string(names[c]) +
                          ": non-numeric value '" + std::string(fields[position[c]]) + "'");
      }
      if (c < kFeatureCount) {
        features.push_back(*v);
      } else {
        targets.push_back(*v);
      }
    }
  }
  Dataset ds{Matrix(n, kFeatureCount, std::move(features)), std::move(targets), false};
  validate_raw_steel(ds);
  return ds;
}

Dataset load_csv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_csv(text);
  } catch (const IngestError& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
}

std::string dataset_to_csv(const Dataset& raw, const std::string& config_digest) {
  if (raw.feature_count() != kFeatureCount) throw SchemaError("dataset_to_csv: expected 13 feature columns");
  std::string out;
  if (!config_digest.empty()) out += "# config_digest=" + config_digest + "\n";
  for (std::string_view name : kFeatureNames) {
    out += name;
    out += ',';
  }
  out += kTargetName;
  out += '\n';
  for (std::size_t r = 0; r < raw.size(); ++r) {
    for (double v : raw.features.row(r)) {
      out += format_double(v);
      out += ',';
    }
    out += format_double(raw.targets[r]);
    out += '\n';
  }
  return out;
}

void save_csv(const Dataset& raw, const std::filesystem::path& path, const std::string& config_digest) {
  write_text_file(path, dataset_to_csv(raw, config_digest));
}

}  // namespace hardinv
