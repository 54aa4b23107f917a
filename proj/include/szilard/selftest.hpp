#pragma once

#include <string>
#include <vector>

/// Built-in oracle suite: independent numerical cross-checks of the solver
/// chain that a user can run on any install.  Each check recomputes its
/// reference by a different route (fine-step integration, discrete
/// optimization, stochastic sampling, synthetic statistics) and compares
/// against the closed-form machinery.

namespace szilard {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // measured numbers, tolerances, timings
};

/// Runs the full suite.  `quick` shrinks the sampling sizes so the whole run
/// stays interactive; the tolerances are loosened accordingly.  Fixed
/// internal seeds make the outcome deterministic.
std::vector<CheckResult> run_selftest(bool quick, unsigned n_threads = 1);

}  // namespace szilard
