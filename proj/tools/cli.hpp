#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fixedform::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitBudget = 3;

inline constexpr const char* kToolVersion = "0.1.0";

// Runs one invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fixedform::cli
