#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bellspin::cli {

inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs one subcommand. `args` excludes the program name. Returns 0 on
/// success, kExitUsage for bad arguments or unreadable inputs and
/// kExitFailure when a computation throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

/// "start:stop:step" (inclusive) or a single value.
std::vector<double> parseRange(const std::string& text);
std::vector<int> parseIntRange(const std::string& text);

/// %.12g
std::string formatNumber(double x);

}  // namespace bellspin::cli
