#pragma once

#include <string>
#include <vector>

namespace pfnet::cli {

// Entry point shared by the pfnet binary and the tests.  args excludes
// argv[0].  Exit codes: 0 success, 1 model/data error, 2 usage error; the
// compare subcommand additionally returns 3 when a measured error exceeds
// 10x its budget.
int run(const std::vector<std::string>& args);

}  // namespace pfnet::cli
