#pragma once

// Fixed text forms shared by the CSV and JSON writers.

#include <string>

#include "divconv/arith.hpp"

namespace divconv {

std::string to_string_u128(u128 v);
// 15 significant digits, scientific ("%.14e").
std::string fmt_sci(double v);
// v rounded to 15 significant digits, for JSON numbers.
double round15(double v);

}  // namespace divconv
