#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spasp::cli {

/// Exit codes: 0 success, 1 the checked program or lookup failed, 2 usage,
/// configuration or runtime error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitError = 2;

/// `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spasp::cli
