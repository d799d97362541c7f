#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace hrafl::detail {

// Shortest representation that round-trips to the same double.
inline std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

}  // namespace hrafl::detail
