#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nme {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 2;
inline constexpr int kExitBadInput = 3;

/// Entry point of the nme tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nme
