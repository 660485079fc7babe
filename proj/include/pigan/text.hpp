#pragma once

// Small text helpers shared by the CSV emitters. format_double produces the
// shortest representation that round-trips, which keeps emitted files
// bit-stable and lossless.

#include <charconv>
#include <string>

namespace pigan {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace pigan
