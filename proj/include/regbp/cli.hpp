#pragma once

#include <iosfwd>

namespace regbp {

/// Entry point behind the `regbp` executable. Returns the process exit code:
/// 0 success, 1 domain error, 2 I/O, parse or usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace regbp
