#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace froglab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kSchemaVersion = 1;

/// Parses argv (argv[0] is the program name), runs the subcommand and returns
/// the process exit status: 0 success, 1 verification failure or runtime error,
/// 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace froglab::cli
