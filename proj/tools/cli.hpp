#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mortgeom::cli {

/// Exit codes: 0 ok, 1 usage, 2 input/parse, 3 geometry, 4 analytics.
enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kGeometry = 3, kAnalytics = 4 };

/// Runs one command; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mortgeom::cli
