#pragma once

#include <iosfwd>

namespace jdgsvd {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitParse = 2,
    kExitNotConverged = 3,
    kExitPrecondition = 4,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jdgsvd
