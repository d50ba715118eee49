#pragma once

#include <string>
#include <vector>

namespace gtfdi::cli {

// Entry point behind the `gtfdi` binary; takes argv without the program name
// and returns the process exit code. 0 = success, 1 = usage or operational
// error, 2 = monitor detected faults.
int run(const std::vector<std::string>& args);

}  // namespace gtfdi::cli
