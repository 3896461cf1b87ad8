#pragma once

#include <iosfwd>

namespace farmlens::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitBandFailure = 2;

// Subcommands: gen, featurize, graph-report, cocluster, train, eval, attack, repro.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace farmlens::cli
