#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace simplegate {

// Serialized artifacts (models, resources, reports) all carry this version.
inline constexpr int kFormatVersion = 1;

// Bad or inconsistent input data, file schemas, degenerate training sets.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// External engine process failures (exit status, timeout, protocol).
struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Label : std::uint8_t { No = 0, Yes = 1 };

inline const char* to_string(Label label) {
  return label == Label::Yes ? "Yes" : "No";
}

// Case-insensitive "yes"/"no"; anything else is a schema violation.
inline Label parse_label(std::string_view text) {
  std::string lower;
  lower.reserve(text.size());
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "yes") return Label::Yes;
  if (lower == "no") return Label::No;
  throw DataError("invalid label \"" + std::string(text) + "\"");
}

// Shortest representation that round-trips exactly.
inline std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ull) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string to_hex(std::uint64_t value) {
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string hash_file(const std::string& path) {
  return to_hex(fnv1a64(read_file(path)));
}

}  // namespace simplegate
