#pragma once

#include <iosfwd>

namespace slcp {

/// Entry point of the `slcp` tool (subcommands solve, example, check).
/// Returns 0 on success, 1 on input errors, 2 when the final solve stage
/// ran out of iterations or stalled.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slcp
