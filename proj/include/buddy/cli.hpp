#pragma once

#include <iosfwd>

namespace buddy {

/// Entry point behind the `buddycheck` binary. Reports go to `out`,
/// diagnostics to `err`; the return value is the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace buddy
