#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ivtf::cli {

enum ExitCode : int
{
    kSuccess = 0,
    kRuntimeFailure = 1,
    kUsageError = 2,
    kVerificationFailure = 3,
};

/// Entry point for `ivtf <subcommand> ...`; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ivtf::cli
