#pragma once

#include <iosfwd>

namespace safeml::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitIntervene = 2,
  kExitInputError = 3,
  kExitInternalError = 4,
};

/// Runs the safeml command line. Verdicts and tables go to `out`, status and
/// errors to `err`; `in` backs "-" as the monitor's field source.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace safeml::cli
