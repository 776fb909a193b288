#pragma once

#include <string>
#include <vector>

namespace semisparse {

/// Entry point of the `semisparse` tool, callable in-process for testing.
/// `args` excludes the program name. Exit codes: 0 success, 1 usage error,
/// 2 I/O error, 3 numerical failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace semisparse
