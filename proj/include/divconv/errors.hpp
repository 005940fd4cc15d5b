#pragma once

#include <stdexcept>
#include <string>

namespace divconv {

// A truncation budget (prime, exponent or series cutoff) is too small for
// the requested evaluation.
class BudgetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A 64- or 128-bit intermediate would wrap around.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// Memory or I/O could not be obtained (allocation failure, unreadable cache).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace divconv
