#pragma once

#include <charconv>
#include <string>

namespace shadowfield::detail {

/// Shortest round-trip decimal; integral values keep a trailing ".0".
template <class T>
std::string shortest(T v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".ein") == std::string::npos) s += ".0";
  return s;
}

}  // namespace shadowfield::detail
