#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace walrus {

// Exit codes: 0 success/verified, 2 verified-negative (no equilibrium,
// robust prices absent, not gross substitutes), 1 error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace walrus
