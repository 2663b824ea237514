#pragma once

#include <iosfwd>

namespace pacmoo {

/// Entry point of the experiment runner. Returns 0 on success, 2 on configuration errors and
/// 1 on runtime failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pacmoo
