#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ultracomb::cli {

enum Exit_code : int { ok = 0, validation = 2, numeric = 3, io = 4 };

// Runs the command line `args` (without the program name).  Artifacts go to
// --out files or to `out`; diagnostics go to `err` as one JSON line.
auto run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int;

}  // namespace ultracomb::cli
