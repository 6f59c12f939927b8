#pragma once

#include <iosfwd>

namespace nearfield::cli {

enum ExitCode { ok = 0, check_failed = 1, config_error = 2, data_error = 3 };

/// Entry point of the `nearfield` tool; writes results to `out` (unless --out
/// is given) and diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nearfield::cli
