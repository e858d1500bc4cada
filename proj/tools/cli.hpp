#pragma once

#include <string>
#include <vector>

namespace tdet::cli {

/// Exit codes: 0 success, 1 runtime error, 2 usage error. Errors are
/// reported as one JSON line on stderr.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace tdet::cli
