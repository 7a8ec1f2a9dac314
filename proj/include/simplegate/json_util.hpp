#pragma once

#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "simplegate/common.hpp"

namespace simplegate {
namespace detail {

inline void check_header(const nlohmann::json& j, std::string_view kind) {
  if (!j.is_object() || !j.contains("version") || !j.contains("kind"))
    throw DataError("missing version/kind header in " + std::string(kind) + " document");
  if (j["kind"].get<std::string>() != kind)
    throw DataError("expected kind \"" + std::string(kind) + "\", found \"" +
                    j["kind"].get<std::string>() + "\"");
  int version = j["version"].get<int>();
  if (version != kFormatVersion)
    throw DataError("unsupported " + std::string(kind) + " version " + std::to_string(version));
}

}  // namespace detail

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw DataError("failed writing file: " + path);
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("failed to parse " + path + ": " + e.what());
  }
}

}  // namespace simplegate
