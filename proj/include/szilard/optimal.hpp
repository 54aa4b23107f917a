#pragma once

#include <cstddef>
#include <vector>

#include "szilard/protocol.hpp"

/// Work-optimal driving of the two-level dot under the reduced master
/// equation (degeneracy ratio fixed at 2).  The variational problem for the
/// extracted work admits a conserved quantity K along extremal occupation
/// paths; every routine here evaluates those closed forms: the extremal
/// velocity, the time<->occupation map, the level curve, the work integral,
/// and the selection of the constant for a given cycle duration.  Branch 0
/// drives a dot measured empty (occupation rises from 0), branch 1 a dot
/// measured full (occupation falls from 1); the rate asymmetry breaks the
/// mirror symmetry, so the two branches are solved separately.

namespace szilard {

/// Occupations this close to the absorbing ends are treated as saturated:
/// the extremal velocity vanishes there only logarithmically slowly, so the
/// time map stays finite while the state pins to the boundary.
inline constexpr double kSaturationMargin = 1e-9;

/// Conserved quantity of the extremal path, K = pdot^2 (2-p) /
/// ((p+pdot)(2-2p-pdot)).  Finite for admissible (p, pdot); used by tests
/// and diagnostics to confirm constancy along solutions.
double conserved_quantity(double p, double pdot);

/// Discriminant of the quadratic solved by the extremal velocity:
/// K^2 (2-p)^2 + 8 K p (1-p) (2-p); non-negative for p in [0,1], k > 0.
double discriminant(double p, double k);

/// Ascending extremal velocity (K (2-3p) + sqrt(D)) / (2 (2-p+K)), the
/// positive root used by branch 0.  Strictly positive on [0,1), zero at 1.
double pdot_optimal(double p, double k);

/// Descending extremal velocity, the negative root of the same quadratic,
/// used by branch 1.  Strictly negative on (0,1], zero at 0.
double pdot_descending(double p, double k);

/// Optimal level as a function of occupation along the extremal path,
/// evaluated in a cancellation-free form so it stays accurate against the
/// log singularities at the absorbing ends.  level_optimal(0, k, 0) =
/// ln(2/k); level_optimal(1, k, 1) = ln(k).
double level_optimal(double p, double k, int branch = 0);

/// Reduced time for the occupation to reach p_target along the extremal
/// path: from 0 upward (branch 0) or from 1 downward (branch 1).  Strictly
/// monotone in p_target toward the far boundary.
double time_of_p(double p_target, double k, int branch = 0);

struct TimeInversion {
    double p = 0.0;
    bool saturated = false;  // requested time exceeds the total traversal time
};

/// Occupation reached after gamma_tau along the extremal path; inverse of
/// time_of_p by bracketed root search.  When gamma_tau exceeds the (finite)
/// time to traverse to the far boundary, returns the capped occupation with
/// the saturated flag set.
TimeInversion invert_time_detail(double gamma_tau, double k, int branch = 0);
double invert_time(double gamma_tau, double k, int branch = 0);

/// Integral of the optimal level over occupation: branch 0 accumulates from
/// 0 up to p_target, branch 1 from p_target up to 1.
double g_function(double p_target, double k, int branch = 0);

struct WorkForK {
    double work = 0.0;   // reduced extracted work for this K and duration
    double p_end = 0.0;  // occupation at the end of the drive
    bool saturated = false;
};

/// Extracted work of the closed cycle driven for gamma_tau with constant k:
/// level integral along the path plus the boundary jumps back to the
/// resting level ln 2.  The sign convention is fixed against the direct
/// stepwise work definition (statistics module): branch 0 gives
/// g - p_end ln 2, branch 1 gives (1 - p_end) ln 2 - g.
WorkForK work_for_k_detail(double gamma_tau, double k, int branch = 0);
double work_for_k(double gamma_tau, double k, int branch = 0);

struct KappaOptimum {
    double kappa = 0.0;  // work-maximizing conserved constant for the duration
    double work = 0.0;
    double p_end = 0.0;
    bool saturated = false;
};

/// Work-maximizing constant for a cycle of duration gamma_tau: coarse scan
/// over log10 K in [-6, 3] at 0.25 steps, then parabolic/golden refinement
/// to relative tolerance 1e-6.  Deterministic; throws NumericsError with
/// scan diagnostics if the maximum sits on the scan edge.
KappaOptimum optimize_kappa_detail(double gamma_tau, int branch = 0);
double optimize_kappa(double gamma_tau, int branch = 0);

/// Extremal solution grids: occupation, matched times, and matched levels,
/// sampled uniformly in occupation (resolving the fast initial transient)
/// and mapped to time through the traversal integral.
struct OptimalSolution {
    double kappa_tau = 0.0;
    double gamma_tau = 0.0;
    int branch = 0;
    std::vector<double> p_grid;    // branch 0: 0 -> p_end; branch 1: 1 -> p_end
    std::vector<double> t_grid;    // strictly increasing, 0 -> gamma_tau
    std::vector<double> eps_grid;  // matched reduced levels
    double predicted_work = 0.0;
    bool saturated = false;
};

struct OptimalProtocol {
    Protocol protocol;  // Jump{ln 2 -> start level}, Ramp, Jump{end level -> ln 2}
    OptimalSolution solution;
};

/// Build the work-optimal protocol for one measurement branch: select the
/// constant, trace the extremal path on grid_points occupation samples
/// (grid_points >= 16), and emit the jump-ramp-jump control.
OptimalProtocol build_optimal_protocol(double gamma_tau, std::size_t grid_points,
                                       int branch);

/// Reference comparison drive: jump by five thermal units away from the
/// resting level, then ramp linearly back over the cycle (raised for branch
/// 0, lowered for branch 1).
Protocol naive_ramp(double gamma_tau, int branch);

}  // namespace szilard
