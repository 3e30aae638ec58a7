#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace motiondex::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kIoError = 2 };

// Runs one subcommand. args excludes the program name. Results go to `out`
// (unless an --out file is given); diagnostics and errors go to `err`, errors
// as a single "error: <kind>: <message>" line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace motiondex::cli
