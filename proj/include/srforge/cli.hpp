#pragma once

#include <ostream>

namespace srforge {

/// The `srforge` command line. Returns the process exit code: 0 on success,
/// 1 when the command failed or reported errors, CLI11's code for usage
/// errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace srforge
