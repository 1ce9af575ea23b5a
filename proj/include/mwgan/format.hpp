#pragma once

#include <charconv>
#include <string>

namespace mwgan {

// Shortest decimal form that round-trips to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace mwgan
