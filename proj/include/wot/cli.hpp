#pragma once

#include <ostream>

namespace wot {

/// Runs the command line with the given arguments, writing results to `out`.
/// Returns 0 on success, 1 on invalid input and 2 on internal failure.
int run_cli(int argc, const char* const* argv, std::ostream& out);

}  // namespace wot
