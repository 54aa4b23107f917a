#include "szilard/stats.hpp"

#include <cmath>
#include <stdexcept>

#include "szilard/physics.hpp"

namespace szilard {

double work_deterministic(const SteppedProtocol& stepped, const PropagationTable& table,
                          double p0) {
    const std::vector<double> p = occupation_at_edges(stepped, table, p0);
    double work = 0.0;
    for (std::size_t k = 0; k <= stepped.steps(); ++k) {
        work -= p[k] * stepped.increment(k);
    }
    return work;
}

double work_deterministic(const Protocol& protocol, double p0,
                          std::size_t grid_points, double degeneracy_ratio) {
    const SteppedProtocol stepped = compile(protocol, grid_points);
    return work_deterministic(stepped, make_table(stepped, degeneracy_ratio), p0);
}

double efficiency(double work) { return work / kLn2; }

double fluctuation_integral(const SteppedProtocol& stepped, const PropagationTable& table,
                            double p0) {
    const std::size_t m = stepped.steps();
    if (stepped.gamma_tau <= 0.0) return 0.0;

    const std::vector<double> p = occupation_at_edges(stepped, table, p0);
    std::vector<double> inc(m + 1);
    for (std::size_t k = 0; k <= m; ++k) inc[k] = stepped.increment(k);

    double var = 0.0;
    for (std::size_t j = 0; j <= m; ++j) {
        var += inc[j] * inc[j] * p[j] * (1.0 - p[j]);
        if (p[j] == 0.0 || inc[j] == 0.0) continue;
        // q(t_k | t_j): occupation at t_k conditioned on occupation 1 at t_j.
        double q = 1.0;
        for (std::size_t k = j + 1; k <= m; ++k) {
            q = table.p_star[k - 1] + (q - table.p_star[k - 1]) * table.decay[k - 1];
            var += 2.0 * inc[j] * inc[k] * p[j] * (q - p[k]);
        }
    }
    return var / stepped.gamma_tau;
}

double fluctuation_integral(const Protocol& protocol, double p0,
                            std::size_t grid_points, double degeneracy_ratio) {
    const SteppedProtocol stepped = compile(protocol, grid_points);
    return fluctuation_integral(stepped, make_table(stepped, degeneracy_ratio), p0);
}

FdrResidual fdr_residual(double work, double fluctuation, double gamma_tau) {
    const double dissipated = kLn2 - work;
    const double lhs = 0.5 * gamma_tau * fluctuation;
    if (std::abs(dissipated) < 1e-12) {
        return {lhs - dissipated, true};
    }
    return {(lhs - dissipated) / dissipated, false};
}

std::pair<double, double> mean_estimator(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("mean_estimator: need at least 2 samples");
    double mean = 0.0;
    for (double w : samples) mean += w;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double w : samples) ss += (w - mean) * (w - mean);
    const double variance = ss / static_cast<double>(n - 1);
    return {mean, std::sqrt(variance / static_cast<double>(n))};
}

VarianceEstimate variance_estimator(const std::vector<double>& samples) {
    const std::size_t n_size = samples.size();
    if (n_size < 5) throw std::invalid_argument("variance_estimator: need at least 5 samples");
    const double n = static_cast<double>(n_size);

    VarianceEstimate out;
    double mean = 0.0;
    for (double w : samples) mean += w;
    mean /= n;
    double ss = 0.0, mu4 = 0.0;
    for (double w : samples) {
        const double d = w - mean;
        ss += d * d;
        mu4 += d * d * d * d;
        out.m1 += w;
        out.m2 += w * w;
        out.m3 += w * w * w;
        out.m4 += w * w * w * w;
    }
    out.m1 /= n;
    out.m2 /= n;
    out.m3 /= n;
    out.m4 /= n;
    mu4 /= n;
    out.variance = ss / (n - 1.0);

    const double var_of_v_central =
        (mu4 - out.variance * out.variance * (n - 3.0) / (n - 1.0)) / n;
    out.std_error = std::sqrt(std::max(0.0, var_of_v_central));

    double var_of_v_raw = out.m4 * (n * (n - 4.0) + 1.0) / (n * (n - 1.0) * (n - 1.0)) -
                          4.0 * out.m3 * out.m1 / n -
                          out.variance * out.variance / (n - 1.0) +
                          3.0 * out.m2 * out.m2 / n;
    if (var_of_v_raw < 0.0) {
        var_of_v_raw = 0.0;
        out.raw_clamped = true;
    }
    out.std_error_raw = std::sqrt(var_of_v_raw);
    return out;
}

EnginePerformance performance_theory(const Protocol& protocol, std::size_t grid_points,
                                     double degeneracy_ratio) {
    if (!(protocol.gamma_tau > 0.0))
        throw std::invalid_argument("performance_theory: need a positive duration");
    const double p0 = protocol.branch == 0 ? 0.0 : 1.0;
    const SteppedProtocol stepped = compile(protocol, grid_points);
    const PropagationTable table = make_table(stepped, degeneracy_ratio);

    EnginePerformance perf;
    perf.gamma_tau = protocol.gamma_tau;
    perf.branch = protocol.branch;
    perf.work = work_deterministic(stepped, table, p0);
    perf.efficiency = efficiency(perf.work);
    perf.power = perf.work / protocol.gamma_tau;
    perf.fluctuation = fluctuation_integral(stepped, table, p0);
    const FdrResidual res = fdr_residual(perf.work, perf.fluctuation, perf.gamma_tau);
    perf.fdr = res.value;
    perf.fdr_absolute = res.absolute;
    return perf;
}

}  // namespace szilard
