#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gin {

// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

// Subcommands: simulate, discover, gin-test, oracle-check, benchmark.
// args excludes the program name. Results go to files or `out`,
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace gin
