#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

#include "szilard/stats.hpp"

/// Comparative studies built on the lower-level modules: duration sweeps of
/// optimal-versus-ramp performance (theory and Monte Carlo), sensitivity of
/// power and fluctuations to a constant level-calibration shift, and the
/// power-for-fluctuation trade that shift enables.

namespace szilard {

/// Monte Carlo performance of one branch-conditioned batch with error bars.
struct McPerformance {
    std::size_t n_cycles = 0;
    double work = 0.0;
    double work_std_error = 0.0;
    double efficiency = 0.0;
    double power = 0.0;
    double fluctuation = 0.0;            // Var(work)/gamma_tau
    double fluctuation_std_error = 0.0;  // central-moment error bar, same units
    double fluctuation_std_error_raw = 0.0;  // raw-moment variant, for comparison
    bool raw_clamped = false;
    double fdr = 0.0;
    bool fdr_absolute = false;
};

struct SweepRow {
    double gamma_tau = 0.0;
    std::array<EnginePerformance, 2> optimal{};  // theory, indexed by branch
    std::array<EnginePerformance, 2> naive{};
    bool has_montecarlo = false;
    std::array<McPerformance, 2> optimal_mc{};
    std::array<McPerformance, 2> naive_mc{};
    bool failed = false;
    std::string note;  // failure annotation; empty on success
};

/// Fair-coin cycle view of two branch performances: work, efficiency and
/// power average with weight 1/2; the fluctuation is the variance of the
/// mixed work distribution (branch average plus the mean-split term) per
/// unit time; the slow-driving residual is recomputed from the averages.
EnginePerformance average_cycle(const std::array<EnginePerformance, 2>& branches);

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

/// One row per requested duration, sorted ascending: optimal protocols on
/// both branches, comparison ramps, theory performance, and optionally
/// branch-conditioned Monte Carlo batches of n_cycles each.  A failing
/// duration annotates its row instead of aborting the sweep.
std::vector<SweepRow> sweep(const std::vector<double>& gamma_tau_list,
                            bool with_montecarlo, std::size_t n_cycles,
                            std::uint64_t master_seed, unsigned n_threads = 1,
                            std::size_t grid_points = 256);

struct DriftResult {
    double gamma_tau = 0.0;
    int branch = 0;
    std::vector<double> shift_values;       // sorted, contains 0
    std::vector<double> rel_power_change;   // (P(d) - P(0)) / |P(0)|
    std::vector<double> rel_fluct_change;   // same for the fluctuation
    double power_exponent = 0.0;            // log-log slope over |shift| in [0.01, 0.1]
    double fluct_exponent = 0.0;
};

/// Rigid level-calibration error study: shift every driven level of the
/// optimal protocol by a constant (the resting level stays put), recompute
/// power and fluctuation, and fit the scaling exponents of the relative
/// changes.  Optimality makes the power loss quadratic in the shift while
/// the fluctuation responds linearly.
DriftResult drift_sensitivity(double gamma_tau, const std::vector<double>& shift_list,
                              int branch = 0, std::size_t grid_points = 256);

struct ParetoTrade {
    double shift = 0.0;             // signed shift actually applied
    double rel_power_change = 0.0;  // quadratically small loss
    double rel_fluct_change = 0.0;  // <= 0 by choice of sign
};

/// Single-shift trade probe: picks the sign of the given shift magnitude
/// that lowers the fluctuation and reports both relative changes.
ParetoTrade pareto_probe(double gamma_tau, double shift, int branch = 0,
                         std::size_t grid_points = 256);

}  // namespace szilard
