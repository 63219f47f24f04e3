#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>

#include "hyperbench/errors.hpp"

namespace hyperbench {

// Locale-independent formatting at 17 significant digits, enough to
// round-trip any double exactly.
inline std::string fmt17(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string fmt_sig(double v, int digits) {
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{}) throw ConfigError("not a number: '" + s + "'");
  for (const char* p = res.ptr; p < e; ++p)
    if (*p != ' ' && *p != '\t') throw ConfigError("trailing characters in number: '" + s + "'");
  return v;
}

inline long parse_int(const std::string& s) {
  long v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{}) throw ConfigError("not an integer: '" + s + "'");
  for (const char* p = res.ptr; p < e; ++p)
    if (*p != ' ' && *p != '\t') throw ConfigError("trailing characters in number: '" + s + "'");
  return v;
}

}  // namespace hyperbench
