#pragma once

// Command-line front end: check, solve, sweep and hardy.
//
// Exit codes: 0 success (check: some existence result applies), 1 no
// existence result applies, 2 solve did not converge, 3 invalid input.

#include <ostream>

namespace snls {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace snls
