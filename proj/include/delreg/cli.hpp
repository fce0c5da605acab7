#pragma once

#include <iosfwd>

namespace delreg::cli {

/// Command-line entry point. Results go to `out`, diagnostics to `err`.
/// Returns 0 on success, 1 on computation errors, 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace delreg::cli
