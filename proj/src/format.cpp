#include "divconv/format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace divconv {

std::string to_string_u128(u128 v) {
  if (v == 0) return "0";
  char buf[40];
  int pos = 40;
  while (v) {
    buf[--pos] = static_cast<char>('0' + static_cast<int>(v % 10));
    v /= 10;
  }
  return std::string(buf + pos, buf + 40);
}

std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.14e", v);
  return buf;
}

double round15(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(fmt_sci(v).c_str(), nullptr);
}

}  // namespace divconv
