#pragma once

#include <string>
#include <vector>

namespace rtevo {

// Exit codes: 0 success, 1 usage error, 2 malformed input file, 3 runtime
// failure (overflow, oracle failure, ...).
int run_cli(const std::vector<std::string>& args);

} // namespace rtevo
