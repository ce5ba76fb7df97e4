#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace radar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitStageError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand (ingest, label, featurize, embed, train, evaluate,
/// compare, order, report). args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace radar::cli
