#pragma once

#include <string>

#include "maxop/kernels.hpp"

namespace maxop {

/// Configuration shared by the verify/continuity subcommands. delta = 0 means
/// 10 * tol; grid_span = 0 means a span derived from the tail radius.
struct RunConfig {
    KernelFamily kernel = KernelFamily::poisson;
    double alpha = 0.5;
    std::string function_json;  // inline JSON; empty -> seeded corpus
    int grid_n = 512;
    double grid_span = 0.0;
    double tol = 1e-5;
    double delta = 0.0;
    unsigned long long seed = 7;
    int corpus_n = 8;
    std::string out_dir = "maxop-out";
    std::string suite = "all";
};

/// Validates the config (grid_n >= 16, tol > 0, delta > tol) and runs the
/// selected verification suite on the configured corpus, writing one JSON
/// report per check plus summary.csv and convergence plots into out_dir.
/// Returns 0 when every executed check passed, 2 otherwise.
int run_verify_suite(const RunConfig& cfg);

}  // namespace maxop
