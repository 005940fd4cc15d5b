#pragma once

#include <iosfwd>

namespace divconv {

// Exit codes: 0 success, 1 verification failure, 2 usage or validation
// error, 3 resource error. Diagnostics go to `err` as one line.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace divconv
