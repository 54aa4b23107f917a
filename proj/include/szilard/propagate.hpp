#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "szilard/protocol.hpp"

/// Compilation of protocols into stepwise-constant form and exact occupation
/// propagation on that form.
///
/// The control is frozen at the midpoint level of each sub-step (exponential
/// midpoint rule: exact for constant levels, second order for smooth ramps).
/// Once compiled, every control change happens at a step edge, so the same
/// object drives deterministic propagation, work/fluctuation sums and exact
/// waiting-time sampling with no further discretization error.

namespace szilard {

inline constexpr std::size_t kDefaultSteps = 512;

struct SteppedProtocol {
    int branch = 0;
    double gamma_tau = 0.0;
    std::vector<double> level;     // frozen level per step (size M)
    std::vector<double> duration;  // per-step duration (size M, sums to gamma_tau)
    std::vector<double> t_edge;    // step edges (size M + 1, from 0 to gamma_tau)

    std::size_t steps() const { return level.size(); }

    /// Control increment applied at edge k, k in [0, M].  Includes the jumps
    /// on and off the rest level ln 2; interior jumps are folded into the
    /// neighboring edge difference (level changes at one instant telescope).
    double increment(std::size_t k) const;

    /// Same geometry with every driven level offset by delta; the rest level
    /// is pinned by the bath, so the offset is absorbed by the edge jumps.
    SteppedProtocol shifted(double delta) const;
};

SteppedProtocol compile(const Protocol& protocol, std::size_t min_steps = kDefaultSteps);

/// Per-step relaxation data for a fixed degeneracy ratio.
struct PropagationTable {
    double ratio = 2.0;
    std::vector<double> lambda;  // relaxation rate per step
    std::vector<double> p_star;  // fixed point per step
    std::vector<double> decay;   // exp(-lambda * duration) per step
};

PropagationTable make_table(const SteppedProtocol& stepped, double degeneracy_ratio = 2.0);

/// Occupation at every step edge, starting from p0 at t = 0 (size M + 1).
std::vector<double> occupation_at_edges(const SteppedProtocol& stepped,
                                        const PropagationTable& table, double p0);

/// Occupation on the compiled grid for a validated protocol; the returned
/// grid contains every segment boundary and sub-step edge.
std::vector<std::pair<double, double>> propagate_protocol(double p0,
                                                          const Protocol& protocol,
                                                          std::size_t grid_points = kDefaultSteps,
                                                          double degeneracy_ratio = 2.0);

/// Two-time propagator q(t | t_prime): occupation at t given occupation 1 at
/// t_prime, both inside [0, gamma_tau].
double conditional_propagator(const Protocol& protocol, double t_prime, double t,
                              std::size_t grid_points = kDefaultSteps,
                              double degeneracy_ratio = 2.0);

}  // namespace szilard
