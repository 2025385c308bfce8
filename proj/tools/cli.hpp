#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace padyn::cli {

enum ExitCode : int {
  kOk = 0,
  kParse = 2,
  kPrecondition = 3,
  kVerification = 4,
  kInternal = 5,
};

// Runs one invocation; args exclude the program name. Reports go to `out`
// (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace padyn::cli
