#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "gwshield/errors.hpp"

namespace gwshield::csvutil {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view field, const std::string& source, std::size_t line,
              const char* what) {
  Int value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(source, line, std::string("expected integer ") + what + ", got '" +
                                       std::string(field) + "'");
  }
  return value;
}

// Fixed six decimals so repeated runs emit byte-identical files.
inline std::string fmt_ms(double ms) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", ms);
  return buf;
}

inline std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace gwshield::csvutil
