#pragma once
// Fast self-check battery covering the formula-level facts every experiment
// rests on; run by the CLI `selftest` subcommand.  Prints one line per check.

#include <ostream>

namespace lkdv {

/// Returns the number of failed checks (0 on success).
int run_selftest(std::ostream& out);

}  // namespace lkdv
