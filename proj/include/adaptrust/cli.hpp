// Command-line front end: detect-indicators, train, assess, generate, evaluate.
#pragma once

#include <ostream>

namespace adaptrust::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2 };

// argv[0] is the program name. Diagnostics go to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace adaptrust::cli
