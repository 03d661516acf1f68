#pragma once

#include <string>
#include <vector>

namespace didlab::cli {

/// Dispatches argv; returns the process exit code:
/// 0 success, 1 usage error, 2 data error, 3 numeric failure.
int run(std::vector<std::string> args);

/// Options that carry an empty help string, across every subcommand;
/// the flag-registry test requires this to come back empty.
std::vector<std::string> undocumented_flags();

/// All preset names accepted by `mc --preset`.
std::vector<std::string> preset_names();

}  // namespace didlab::cli
