#pragma once

#include <charconv>
#include <string>

namespace lawrisk::detail {

// Shortest decimal text that reads back to the same double.
inline std::string shortest(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

} // namespace lawrisk::detail
