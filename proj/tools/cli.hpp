#pragma once

#include <string>
#include <vector>

namespace riskctl::cli {

/// Runs the command line; returns 0 on success, 1 when the inputs produced
/// errors and 2 on usage errors.
int run(const std::vector<std::string>& args);

}  // namespace riskctl::cli
