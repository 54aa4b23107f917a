#pragma once

#include <cstddef>
#include <vector>

#include "szilard/protocol.hpp"

/// Direct numerical maximization of the extracted work over piecewise-
/// constant drives, used as an independent check on the variational closed
/// forms.  Decision variables are the step levels; propagation and work go
/// through the same deterministic kernels as everything else.

namespace szilard {

struct BruteForceResult {
    Protocol protocol;           // jump/hold chain including the resting-level ends
    std::vector<double> levels;  // the optimized step levels
    double work = 0.0;           // reduced work of the best drive found
    bool converged = false;      // at least one descent run converged cleanly
};

/// Maximize work over n_steps equal-duration levels (n_steps in [8, 256])
/// for the given branch (0: start empty, 1: start full), using gradient
/// descent from several deterministic starts plus seeded random restarts.
/// Never seeded from the variational solution, so agreement with it is
/// evidence, not circularity.  The result is a lower bound on the true
/// optimum.
BruteForceResult brute_force_optimum(double gamma_tau, std::size_t n_steps,
                                     int branch = 0);

/// Work of an equal-duration stepped drive and its gradient with respect to
/// the levels, by one forward propagation and one adjoint sweep.  Exposed
/// for direct finite-difference verification.
double stepped_work_and_gradient(const std::vector<double>& levels, double gamma_tau,
                                 int branch, std::vector<double>* gradient);

}  // namespace szilard
