#pragma once

#include <charconv>
#include <string>
#include <string_view>

namespace cubepose {

// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  constexpr const char* kWs = " \t\r\n";
  const auto b = s.find_first_not_of(kWs);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kWs);
  return s.substr(b, e - b + 1);
}

}  // namespace cubepose
