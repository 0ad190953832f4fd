#pragma once

#include <iosfwd>

namespace qndc::cli {

/// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_inconclusive = 2;
inline constexpr int exit_not_certified = 10;

/// Entry point for `qndc <subcommand> ...`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace qndc::cli
