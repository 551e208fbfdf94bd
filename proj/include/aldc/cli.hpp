#pragma once

#include <iosfwd>

namespace aldc::cli {

/// Entry point shared by the aldc binary and the tests. Returns 0 on success,
/// 2 for usage errors and 1 for config or data errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aldc::cli
