#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcopt {

/// Dispatches the qcopt subcommands (optimize, bench, db-build, gen-dataset,
/// train) and returns the process exit code. Split from main() so tests can
/// drive the CLI in-process. `out`/`err` receive what would go to
/// stdout/stderr.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcopt
