#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "szilard/propagate.hpp"
#include "szilard/protocol.hpp"

/// Stochastic unraveling of the dot dynamics: exact jump-time sampling on
/// the stepwise-frozen control (no thinning, no time-step error), full
/// measurement-feedback cycles, and deterministic per-cycle random
/// substreams so batches are reproducible and order-independent.

namespace szilard {

struct TrajectorySample {
    int initial_occupation = 0;
    std::vector<double> jump_times;  // strictly increasing, in [0, gamma_tau]
    double work = 0.0;               // reduced work of this realization
};

struct CycleResult {
    int measured_bit = 0;
    TrajectorySample trajectory;
    double work = 0.0;
};

struct SeededRun {
    std::uint64_t master_seed = 0;
    std::uint64_t cycle_index = 0;
};

/// Deterministic decorrelated engine seed for one cycle of a batch.
std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t cycle_index);

/// Sample one occupation trajectory under the stepwise-frozen control.  The
/// hazard is constant within each step (fill rate r*f when empty, empty
/// rate 1-f when occupied, reduced units), so waiting times are drawn by
/// exact inverse transform across step boundaries.  Work accumulates as
/// -n(t_k) * (level increment at t_k) over every control update.
TrajectorySample sample_trajectory(const SteppedProtocol& stepped,
                                   const PropagationTable& table, int n0,
                                   std::mt19937_64& rng);
TrajectorySample sample_trajectory(const Protocol& protocol, int n0,
                                   std::mt19937_64& rng,
                                   std::size_t grid_points = kDefaultSteps);

/// One full cycle: fair-coin measurement (thermalization at the resting
/// level gives exactly half occupation), branch feedback, stochastic drive.
/// Both protocols must carry the same duration.
CycleResult run_cycle(const Protocol& branch0, const Protocol& branch1,
                      const SeededRun& seed);

/// n_cycles independent cycles; cycle i is a pure function of
/// (master_seed, i), so results do not depend on evaluation order or
/// thread count.  n_threads > 1 distributes cycles round-robin.
std::vector<CycleResult> run_batch(const Protocol& branch0, const Protocol& branch1,
                                   std::size_t n_cycles, std::uint64_t master_seed,
                                   unsigned n_threads = 1);

/// Conditioned batch: every cycle forced onto one protocol's branch (the
/// measurement outcome is pinned to protocol.branch instead of a coin).
std::vector<CycleResult> run_batch_single(const Protocol& protocol,
                                          std::size_t n_cycles,
                                          std::uint64_t master_seed,
                                          unsigned n_threads = 1);

/// Per-cycle work values, in cycle order.
std::vector<double> works_of(const std::vector<CycleResult>& results);

}  // namespace szilard
