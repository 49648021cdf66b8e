#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace hybrid::detail {

// Shortest text that parses back to the same double.
inline std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf, end);
}

}  // namespace hybrid::detail
