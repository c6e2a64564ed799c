#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rcrc::cli {

enum ExitCode : int { ok = 0, data_error = 1, usage_error = 2 };

// Runs one `rcrc-forge` invocation. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, char** argv);

}  // namespace rcrc::cli
