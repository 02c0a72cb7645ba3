#pragma once

#include <ostream>

namespace wec::cli {

/// Runs the `wec` command line. Results go to `out`, structured logs to
/// standard error. Returns 0 on success, 1 when a command fails and 2 on
/// usage errors.
int run(int argc, const char *const *argv, std::ostream &out);

} // namespace wec::cli
