#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hardinv/data/dataset.hpp"

namespace hardinv {

/// Parses the steel table: a header naming the 13 features and
/// hardness_HRC (any order, case-insensitive), then one sample per row.
/// Lines starting with '#' are ignored. Errors name the 1-based data row
/// and the column.
Dataset parse_csv(std::string_view text);
Dataset load_csv(const std::filesystem::path& path);

/// Header in schema order, values in shortest round-trip form, preceded by
/// a `# config_digest=` line when a digest is given.
std::string dataset_to_csv(const Dataset& raw, const std::string& config_digest = {});
void save_csv(const Dataset& raw, const std::filesystem::path& path, const std::string& config_digest = {});

}  // namespace hardinv
