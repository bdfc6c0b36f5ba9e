#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qfc::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 usage error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace qfc::cli
