#pragma once

#include <string>

namespace signshape {

struct RunOptions {
    int threads = 1;
    std::string preset;  // "", "small", "medium", "large"
};

// Exit codes of run():
//   0  success
//   1  verification reported failing checks
//   2  invalid configuration (stderr names the offending key)
//   3  solver non-convergence
//   4  precondition violation
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitSolverFailure = 3;
inline constexpr int kExitPrecondition = 4;

/// Execute one batch command (dirichlet, obstacle, optimize, radial,
/// rearrange, stochastic, verify) against a JSON config, writing artifacts
/// with fixed names under out_dir.
int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        const RunOptions& opts = {});

}
