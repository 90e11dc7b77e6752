#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

namespace hardinv {

using Json = nlohmann::json;

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Serializes a JSON document with floats written via format_double.
/// Two-space indentation, keys in the document's (sorted) order.
std::string dump_json(const Json& doc);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);

/// 64-bit FNV-1a, used for parameter and config digests.
class Fnv1a {
 public:
  void update(std::span<const std::byte> bytes);
  void update(std::string_view text);
  void update(std::span<const double> values);
  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace hardinv
