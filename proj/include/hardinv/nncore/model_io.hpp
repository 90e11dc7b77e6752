#pragma once

#include <filesystem>

#include "hardinv/common/json_io.hpp"
#include "hardinv/nncore/mlp.hpp"

namespace hardinv {

inline constexpr int kModelSchemaVersion = 1;

/// {schema_version, widths: [in, hidden, out], output_mode,
///  layers: [{weight: [[...]], bias: [...]}, ...]}
Json mlp_to_json(const Mlp& net);
/// Validates schema version, layer count, every shape, and finiteness.
/// Throws IngestError describing the first problem found.
Mlp mlp_from_json(const Json& doc);

void save_mlp(const Mlp& net, const std::filesystem::path& path);
Mlp load_mlp(const std::filesystem::path& path);

}  // namespace hardinv
