#include "szilard/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include "szilard/numerics.hpp"
#include "szilard/optimal.hpp"
#include "szilard/physics.hpp"
#include "szilard/propagate.hpp"
#include "szilard/simulate.hpp"

namespace szilard {

namespace {

McPerformance mc_from_works(const std::vector<double>& works, double gamma_tau) {
    McPerformance mc;
    mc.n_cycles = works.size();
    const auto [mean, se] = mean_estimator(works);
    const VarianceEstimate var = variance_estimator(works);
    mc.work = mean;
    mc.work_std_error = se;
    mc.efficiency = efficiency(mean);
    mc.power = mean / gamma_tau;
    mc.fluctuation = var.variance / gamma_tau;
    mc.fluctuation_std_error = var.std_error / gamma_tau;
    mc.fluctuation_std_error_raw = var.std_error_raw / gamma_tau;
    mc.raw_clamped = var.raw_clamped;
    const FdrResidual fdr = fdr_residual(mean, mc.fluctuation, gamma_tau);
    mc.fdr = fdr.value;
    mc.fdr_absolute = fdr.absolute;
    return mc;
}

/// Least-squares slope of log|change| against log|shift| over the fitting
/// window; cancellation below it and curvature above it would bias the fit.
double fit_exponent(const std::vector<double>& shifts,
                    const std::vector<double>& rel_changes) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        const double mag = std::abs(shifts[i]);
        if (mag < 0.01 - 1e-12 || mag > 0.1 + 1e-12) continue;
        const double change = std::abs(rel_changes[i]);
        if (change == 0.0) continue;
        xs.push_back(std::log(mag));
        ys.push_back(std::log(change));
    }
    if (xs.size() < 2) {
        throw std::invalid_argument(
            "drift_sensitivity: need at least two usable shifts in [0.01, 0.1]");
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

struct ShiftResponse {
    double work = 0.0;
    double fluctuation = 0.0;
};

/// Work and fluctuation of the branch-optimal drive under a rigid level
/// shift (resting level unshifted).
class ShiftStudy {
  public:
    ShiftStudy(double gamma_tau, int branch, std::size_t grid_points)
        : p0_(branch == 0 ? 0.0 : 1.0) {
        const OptimalProtocol built =
            build_optimal_protocol(gamma_tau, grid_points, branch);
        base_ = compile(built.protocol, kDefaultSteps);
    }

    ShiftResponse at(double shift) const {
        const SteppedProtocol shifted = base_.shifted(shift);
        const PropagationTable table = make_table(shifted);
        return {work_deterministic(shifted, table, p0_),
                fluctuation_integral(shifted, table, p0_)};
    }

  private:
    double p0_;
    SteppedProtocol base_;
};

}  // namespace

EnginePerformance average_cycle(const std::array<EnginePerformance, 2>& branches) {
    if (branches[0].gamma_tau != branches[1].gamma_tau) {
        throw std::invalid_argument("average_cycle: branch durations differ");
    }
    EnginePerformance avg;
    avg.gamma_tau = branches[0].gamma_tau;
    avg.branch = -1;  // mixed-cycle view
    avg.work = 0.5 * (branches[0].work + branches[1].work);
    avg.efficiency = efficiency(avg.work);
    avg.power = avg.work / avg.gamma_tau;
    const double split = branches[0].work - branches[1].work;
    avg.fluctuation = 0.5 * (branches[0].fluctuation + branches[1].fluctuation) +
                      0.25 * split * split / avg.gamma_tau;
    const FdrResidual fdr = fdr_residual(avg.work, avg.fluctuation, avg.gamma_tau);
    avg.fdr = fdr.value;
    avg.fdr_absolute = fdr.absolute;
    return avg;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi >= lo) || n == 0) {
        throw std::invalid_argument("log_spaced: need 0 < lo <= hi and n >= 1");
    }
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo * std::exp(step * static_cast<double>(i));
    }
    out.back() = hi;
    return out;
}

std::vector<SweepRow> sweep(const std::vector<double>& gamma_tau_list,
                            bool with_montecarlo, std::size_t n_cycles,
                            std::uint64_t master_seed, unsigned n_threads,
                            std::size_t grid_points) {
    if (gamma_tau_list.empty()) {
        throw std::invalid_argument("sweep: empty duration list");
    }
    for (double gt : gamma_tau_list) {
        if (!(gt > 0.0)) throw std::invalid_argument("sweep: durations must be positive");
    }
    std::vector<double> sorted = gamma_tau_list;
    std::sort(sorted.begin(), sorted.end());

    std::vector<SweepRow> rows;
    rows.reserve(sorted.size());
    for (std::size_t idx = 0; idx < sorted.size(); ++idx) {
        const double gt = sorted[idx];
        SweepRow row;
        row.gamma_tau = gt;
        try {
            for (int branch : {0, 1}) {
                const OptimalProtocol built =
                    build_optimal_protocol(gt, grid_points, branch);
                row.optimal[branch] = performance_theory(built.protocol);
                const Protocol ramp = naive_ramp(gt, branch);
                row.naive[branch] = performance_theory(ramp);
                if (with_montecarlo) {
                    const std::uint64_t tag = idx * 4 + static_cast<unsigned>(branch);
                    row.optimal_mc[branch] = mc_from_works(
                        works_of(run_batch_single(built.protocol, n_cycles,
                                                  substream_seed(master_seed, tag),
                                                  n_threads)),
                        gt);
                    row.naive_mc[branch] = mc_from_works(
                        works_of(run_batch_single(ramp, n_cycles,
                                                  substream_seed(master_seed, tag + 2),
                                                  n_threads)),
                        gt);
                }
            }
            row.has_montecarlo = with_montecarlo;
        } catch (const std::exception& err) {
            row.failed = true;
            row.note = err.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

DriftResult drift_sensitivity(double gamma_tau, const std::vector<double>& shift_list,
                              int branch, std::size_t grid_points) {
    const bool has_zero = std::any_of(shift_list.begin(), shift_list.end(),
                                      [](double s) { return std::abs(s) < 1e-15; });
    if (!has_zero) {
        throw std::invalid_argument("drift_sensitivity: shift list must contain 0");
    }

    DriftResult result;
    result.gamma_tau = gamma_tau;
    result.branch = branch;
    result.shift_values = shift_list;
    std::sort(result.shift_values.begin(), result.shift_values.end());

    const ShiftStudy study(gamma_tau, branch, grid_points);
    const ShiftResponse base = study.at(0.0);
    result.rel_power_change.reserve(result.shift_values.size());
    result.rel_fluct_change.reserve(result.shift_values.size());
    for (double shift : result.shift_values) {
        const ShiftResponse r = study.at(shift);
        // Power and work share gamma_tau, so the relative changes coincide.
        result.rel_power_change.push_back((r.work - base.work) / std::abs(base.work));
        result.rel_fluct_change.push_back((r.fluctuation - base.fluctuation) /
                                          std::abs(base.fluctuation));
    }
    result.power_exponent = fit_exponent(result.shift_values, result.rel_power_change);
    result.fluct_exponent = fit_exponent(result.shift_values, result.rel_fluct_change);
    return result;
}

ParetoTrade pareto_probe(double gamma_tau, double shift, int branch,
                         std::size_t grid_points) {
    ParetoTrade trade;
    if (shift == 0.0) return trade;
    const double mag = std::abs(shift);
    const ShiftStudy study(gamma_tau, branch, grid_points);
    const ShiftResponse base = study.at(0.0);
    const ShiftResponse up = study.at(mag);
    const ShiftResponse down = study.at(-mag);
    const bool pick_up = up.fluctuation <= down.fluctuation;
    const ShiftResponse& chosen = pick_up ? up : down;
    trade.shift = pick_up ? mag : -mag;
    trade.rel_power_change = (chosen.work - base.work) / std::abs(base.work);
    trade.rel_fluct_change =
        (chosen.fluctuation - base.fluctuation) / std::abs(base.fluctuation);
    return trade;
}

}  // namespace szilard
