#include "szilard/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "szilard/numerics.hpp"

namespace szilard {

namespace {

/// Uniform draw strictly inside (0, 1): 53 random bits centered in the bin,
/// so the exponential transform below never returns 0 or infinity.
double uniform_open(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double exponential_budget(std::mt19937_64& rng) {
    return -std::log1p(-uniform_open(rng));
}

void check_pair(const Protocol& branch0, const Protocol& branch1) {
    if (branch0.gamma_tau != branch1.gamma_tau) {
        throw std::invalid_argument("run_cycle: branch protocols differ in duration");
    }
}

struct PreparedBranch {
    SteppedProtocol stepped;
    PropagationTable table;
};

PreparedBranch prepare(const Protocol& protocol) {
    PreparedBranch b;
    b.stepped = compile(protocol, kDefaultSteps);
    b.table = make_table(b.stepped);
    return b;
}

CycleResult cycle_from(const PreparedBranch* branches[2], bool coin_toss,
                       int forced_bit, const SeededRun& seed) {
    std::mt19937_64 rng(substream_seed(seed.master_seed, seed.cycle_index));
    const int bit = coin_toss ? static_cast<int>(rng() & 1u) : forced_bit;
    const PreparedBranch& b = *branches[bit];
    CycleResult result;
    result.measured_bit = bit;
    result.trajectory = sample_trajectory(b.stepped, b.table, bit, rng);
    result.work = result.trajectory.work;
    return result;
}

std::vector<CycleResult> batch_loop(const PreparedBranch* branches[2], bool coin_toss,
                                    int forced_bit, std::size_t n_cycles,
                                    std::uint64_t master_seed, unsigned n_threads) {
    if (n_cycles == 0) {
        throw std::invalid_argument("run_batch: need at least one cycle");
    }
    std::vector<CycleResult> results(n_cycles);
    const auto worker = [&](std::size_t offset, std::size_t stride) {
        for (std::size_t i = offset; i < n_cycles; i += stride) {
            results[i] = cycle_from(branches, coin_toss, forced_bit, {master_seed, i});
        }
    };
    const unsigned threads =
        std::min<std::size_t>(std::max(1u, n_threads), n_cycles);
    if (threads == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
        for (std::thread& t : pool) t.join();
    }
    return results;
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t cycle_index) {
    return splitmix64(master_seed ^ splitmix64(cycle_index + 0x9e3779b97f4a7c15ull));
}

TrajectorySample sample_trajectory(const SteppedProtocol& stepped,
                                   const PropagationTable& table, int n0,
                                   std::mt19937_64& rng) {
    if (n0 != 0 && n0 != 1) {
        throw std::invalid_argument("sample_trajectory: occupation bit must be 0 or 1");
    }
    const std::size_t m = stepped.steps();
    TrajectorySample out;
    out.initial_occupation = n0;

    int n = n0;
    double work = -static_cast<double>(n) * stepped.increment(0);
    double budget = exponential_budget(rng);
    for (std::size_t k = 0; k < m; ++k) {
        const double fill = table.lambda[k] * table.p_star[k];      // rate into the dot
        const double empty = table.lambda[k] - fill;                // rate out of it
        double t_now = stepped.t_edge[k];
        double remaining = stepped.duration[k];
        while (remaining > 0.0) {
            const double hazard = n == 0 ? fill : empty;
            if (hazard <= 0.0) break;  // absorbing within this step
            const double wait = budget / hazard;
            if (wait > remaining) {
                budget -= hazard * remaining;
                break;
            }
            t_now += wait;
            remaining -= wait;
            out.jump_times.push_back(t_now);
            n = 1 - n;
            budget = exponential_budget(rng);
        }
        work -= static_cast<double>(n) * stepped.increment(k + 1);
    }
    out.work = work;
    return out;
}

TrajectorySample sample_trajectory(const Protocol& protocol, int n0,
                                   std::mt19937_64& rng, std::size_t grid_points) {
    const SteppedProtocol stepped = compile(protocol, grid_points);
    const PropagationTable table = make_table(stepped);
    return sample_trajectory(stepped, table, n0, rng);
}

CycleResult run_cycle(const Protocol& branch0, const Protocol& branch1,
                      const SeededRun& seed) {
    check_pair(branch0, branch1);
    const PreparedBranch b0 = prepare(branch0);
    const PreparedBranch b1 = prepare(branch1);
    const PreparedBranch* branches[2] = {&b0, &b1};
    return cycle_from(branches, true, 0, seed);
}

std::vector<CycleResult> run_batch(const Protocol& branch0, const Protocol& branch1,
                                   std::size_t n_cycles, std::uint64_t master_seed,
                                   unsigned n_threads) {
    check_pair(branch0, branch1);
    const PreparedBranch b0 = prepare(branch0);
    const PreparedBranch b1 = prepare(branch1);
    const PreparedBranch* branches[2] = {&b0, &b1};
    return batch_loop(branches, true, 0, n_cycles, master_seed, n_threads);
}

std::vector<CycleResult> run_batch_single(const Protocol& protocol,
                                          std::size_t n_cycles,
                                          std::uint64_t master_seed,
                                          unsigned n_threads) {
    const PreparedBranch b = prepare(protocol);
    const PreparedBranch* branches[2] = {&b, &b};
    return batch_loop(branches, false, protocol.branch, n_cycles, master_seed,
                      n_threads);
}

std::vector<double> works_of(const std::vector<CycleResult>& results) {
    std::vector<double> works(results.size());
    for (std::size_t i = 0; i < results.size(); ++i) works[i] = results[i].work;
    return works;
}

}  // namespace szilard
