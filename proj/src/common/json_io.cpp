#include "hardinv/common/json_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hardinv/common/errors.hpp"

namespace hardinv {

std::string format_double(double value) {
  if (!std::isfinite(value)) throw NonFiniteError("cannot format non-finite value");
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

namespace {

void dump_value(const Json& v, std::string& out, int depth) {
  const auto newline = [&](int d) {
    out.push_back('\n');
    out.append(static_cast<std::size_t>(2 * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        out += Json(key).dump();
        out += ": ";
        dump_value(item, out, depth + 1);
      }
      newline(depth);
      out.push_back('}');
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line; matrices get one row per line.
      const bool scalars = !v.front().is_structured();
      out.push_back('[');
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += scalars ? ", " : ",";
        first = false;
        if (!scalars) newline(depth + 1);
        dump_value(item, out, depth + 1);
      }
      if (!scalars) newline(depth);
      out.push_back(']');
      return;
    }
    case Json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const Json& doc) {
  std::string out;
  dump_value(doc, out, 0);
  out.push_back('\n');
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw IngestError(path.string() + ": invalid JSON: " + e.what());
  }
}

void Fnv1a::update(std::span<const std::byte> bytes) {
  for (const std::byte b : bytes) {
    state_ ^= static_cast<std::uint64_t>(b);
    state_ *= 0x100000001b3ULL;
  }
}

void Fnv1a::update(std::string_view text) { update(std::as_bytes(std::span(text.data(), text.size()))); }

void Fnv1a::update(std::span<const double> values) { update(std::as_bytes(values)); }

std::string Fnv1a::hex() const {
  std::array<char, 17> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + 16, state_, 16);
  std::string s(buf.data(), res.ptr);
  return std::string(16 - s.size(), '0') + s;
}

}  // namespace hardinv
