#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsgp::cli {

/// Exit codes shared by every subcommand.
enum Exit : int {
    kOk = 0,
    kInternal = 1,
    kDataError = 2,
    kConfigError = 3,
};

/// Runs one command line (argv[0] is the program name). Reports go to `out`,
/// diagnostics and progress to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tsgp::cli
