#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spin7::cli {

enum ExitCode { kSuccess = 0, kCheckFailed = 1, kUsageError = 2 };

// args excludes the program name. Reports go to out (or --out), diagnostics to err.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

// key=value lines; '#' starts a comment. Throws ParseError on malformed lines.
std::vector<std::pair<std::string, std::string>> read_config(std::istream& in);

}  // namespace spin7::cli
