#include "szilard/optimal.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "szilard/numerics.hpp"
#include "szilard/physics.hpp"

namespace szilard {

namespace {

constexpr double kQuadTol = 1e-12;

void check_k(double k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw std::invalid_argument("optimal: constant k must be positive and finite");
    }
}

void check_p_closed(double p) {
    if (!(p >= 0.0) || !(p <= 1.0)) {
        throw std::invalid_argument("optimal: occupation out of [0, 1]");
    }
}

/// 1 / pdot along the traversal direction; positive for both branches.
double inverse_speed(double p, double k, int branch) {
    return branch == 0 ? 1.0 / pdot_optimal(p, k) : -1.0 / pdot_descending(p, k);
}

void check_branch(int branch) {
    if (branch != 0 && branch != 1) {
        throw std::invalid_argument("optimal: branch must be 0 or 1");
    }
}

}  // namespace

double conserved_quantity(double p, double pdot) {
    return pdot * pdot * (2.0 - p) / ((p + pdot) * (2.0 - 2.0 * p - pdot));
}

double discriminant(double p, double k) {
    check_k(k);
    check_p_closed(p);
    const double a = k * (2.0 - p);
    return a * (a + 8.0 * p * (1.0 - p));
}

double pdot_optimal(double p, double k) {
    const double root = std::sqrt(discriminant(p, k));
    if (p <= 2.0 / 3.0) {
        return (k * (2.0 - 3.0 * p) + root) / (2.0 * (2.0 - p + k));
    }
    // Rationalized form: keeps full precision where K(2-3p) goes negative
    // and would cancel against the square root.
    return 4.0 * k * p * (1.0 - p) / (root + k * (3.0 * p - 2.0));
}

double pdot_descending(double p, double k) {
    const double root = std::sqrt(discriminant(p, k));
    if (p >= 2.0 / 3.0) {
        return (k * (2.0 - 3.0 * p) - root) / (2.0 * (2.0 - p + k));
    }
    return -4.0 * k * p * (1.0 - p) / (k * (2.0 - 3.0 * p) + root);
}

double level_optimal(double p, double k, int branch) {
    check_branch(branch);
    const double root = std::sqrt(discriminant(p, k));
    if (branch == 0) {
        // ln[16 (1-p)^2 (2-p) (2-p+K) / ((B + sqrt(D)) ((2-p)(K+2p) + sqrt(D)))]
        // with B = (2-p)(4-4p+K); every log argument is a sum of positives.
        const double b = (2.0 - p) * (4.0 - 4.0 * p + k);
        const double d = (2.0 - p) * (k + 2.0 * p) + root;
        return std::log(16.0) + 2.0 * std::log1p(-p) + std::log(2.0 - p) +
               std::log(2.0 - p + k) - std::log(b + root) - std::log(d);
    }
    // ln[(2K(1 - p/2) + 4p(1-p) + sqrt(D)) / (2 p^2)]; numerator again a sum
    // of positives, so the log stays exact down to the p -> 0 divergence.
    const double n = 2.0 * k * (1.0 - 0.5 * p) + 4.0 * p * (1.0 - p) + root;
    return std::log(n) - std::log(2.0) - 2.0 * std::log(p);
}

double time_of_p(double p_target, double k, int branch) {
    check_branch(branch);
    check_k(k);
    check_p_closed(p_target);
    const auto speed = [k, branch](double p) { return inverse_speed(p, k, branch); };
    if (branch == 0) {
        // The traversal slows to pdot ~ 2(1-p) near the far boundary, so the
        // time to reach p = 1 itself diverges logarithmically.
        if (p_target >= 1.0) {
            throw std::invalid_argument("time_of_p: traversal to p = 1 never completes");
        }
        if (p_target == 0.0) return 0.0;
        return integrate(speed, 0.0, p_target, kQuadTol, kQuadTol).value;
    }
    if (p_target <= 0.0) {
        throw std::invalid_argument("time_of_p: traversal to p = 0 never completes");
    }
    if (p_target == 1.0) return 0.0;
    return integrate(speed, p_target, 1.0, kQuadTol, kQuadTol).value;
}

TimeInversion invert_time_detail(double gamma_tau, double k, int branch) {
    check_branch(branch);
    if (!(gamma_tau >= 0.0)) {
        throw std::invalid_argument("optimal: gamma_tau must be non-negative");
    }
    const double start = branch == 0 ? 0.0 : 1.0;
    if (gamma_tau == 0.0) return {start, false};
    const double limit = branch == 0 ? 1.0 - kSaturationMargin : kSaturationMargin;
    const double total = time_of_p(limit, k, branch);
    if (gamma_tau >= total) return {limit, true};
    const auto residual = [&](double p) { return time_of_p(p, k, branch) - gamma_tau; };
    const double lo = branch == 0 ? 0.0 : kSaturationMargin;
    const double hi = branch == 0 ? 1.0 - kSaturationMargin : 1.0;
    return {find_root(residual, lo, hi), false};
}

double invert_time(double gamma_tau, double k, int branch) {
    return invert_time_detail(gamma_tau, k, branch).p;
}

double g_function(double p_target, double k, int branch) {
    check_branch(branch);
    check_k(k);
    check_p_closed(p_target);
    const auto level = [k, branch](double p) { return level_optimal(p, k, branch); };
    if (branch == 0) {
        if (p_target == 0.0) return 0.0;
        return integrate(level, 0.0, p_target, kQuadTol, kQuadTol).value;
    }
    if (p_target == 1.0) return 0.0;
    return integrate(level, p_target, 1.0, kQuadTol, kQuadTol).value;
}

WorkForK work_for_k_detail(double gamma_tau, double k, int branch) {
    const TimeInversion inv = invert_time_detail(gamma_tau, k, branch);
    const double g = g_function(inv.p, k, branch);
    // Fixed against the direct stepwise work definition: the final jump back
    // to the resting level ln 2 contributes -p_end (ln 2 - level), and the
    // integration-by-parts boundary terms cancel the rest.
    const double work = branch == 0 ? g - inv.p * kLn2 : (1.0 - inv.p) * kLn2 - g;
    return {work, inv.p, inv.saturated};
}

double work_for_k(double gamma_tau, double k, int branch) {
    return work_for_k_detail(gamma_tau, k, branch).work;
}

KappaOptimum optimize_kappa_detail(double gamma_tau, int branch) {
    check_branch(branch);
    if (!(gamma_tau > 0.0)) {
        throw std::invalid_argument("optimal: gamma_tau must be positive");
    }
    constexpr double kLogLo = -6.0;
    constexpr double kLogHi = 3.0;
    constexpr double kLogStep = 0.25;
    const int n = static_cast<int>(std::lround((kLogHi - kLogLo) / kLogStep)) + 1;

    std::vector<double> log10_k(n), work(n);
    int best = 0;
    for (int i = 0; i < n; ++i) {
        log10_k[i] = kLogLo + kLogStep * i;
        work[i] = work_for_k(gamma_tau, std::pow(10.0, log10_k[i]), branch);
        if (work[i] > work[best]) best = i;
    }
    if (best == 0 || best == n - 1) {
        std::ostringstream msg;
        msg << "optimize_kappa: maximum at scan edge (gamma_tau=" << gamma_tau
            << ", branch=" << branch << ", log10 K=" << log10_k[best]
            << ", work=" << work[best] << ", neighbor work="
            << work[best == 0 ? 1 : n - 2] << ")";
        throw NumericsError(msg.str());
    }

    const auto negated = [&](double u) {
        return -work_for_k(gamma_tau, std::pow(10.0, u), branch);
    };
    double u_star = log10_k[best];
    if (work[best] > work[best - 1] && work[best] > work[best + 1]) {
        // Relative tolerance 1e-6 on K itself = absolute ln(10)^-1 * 1e-6 on
        // the log10 search coordinate.
        const ScalarMinResult min =
            minimize_scalar(negated, log10_k[best - 1], u_star, log10_k[best + 1],
                            1e-6 / std::log(10.0), 0.0);
        u_star = min.x;
    }
    const double kappa = std::pow(10.0, u_star);
    const WorkForK detail = work_for_k_detail(gamma_tau, kappa, branch);
    return {kappa, detail.work, detail.p_end, detail.saturated};
}

double optimize_kappa(double gamma_tau, int branch) {
    return optimize_kappa_detail(gamma_tau, branch).kappa;
}

OptimalProtocol build_optimal_protocol(double gamma_tau, std::size_t grid_points,
                                       int branch) {
    check_branch(branch);
    if (grid_points < 16) {
        throw std::invalid_argument("build_optimal_protocol: need at least 16 grid points");
    }
    const KappaOptimum opt = optimize_kappa_detail(gamma_tau, branch);
    const double p_end = opt.p_end;
    const std::size_t n = grid_points;

    OptimalSolution sol;
    sol.kappa_tau = opt.kappa;
    sol.gamma_tau = gamma_tau;
    sol.branch = branch;
    sol.predicted_work = opt.work;
    sol.saturated = opt.saturated;
    sol.p_grid.resize(n);
    sol.t_grid.resize(n);
    sol.eps_grid.resize(n);

    const double p_start = branch == 0 ? 0.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(n - 1);
        sol.p_grid[i] = p_start + (p_end - p_start) * frac;
        sol.eps_grid[i] = level_optimal(sol.p_grid[i], opt.kappa, branch);
    }
    const auto speed = [&](double p) { return inverse_speed(p, opt.kappa, branch); };
    sol.t_grid[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double a = std::min(sol.p_grid[i - 1], sol.p_grid[i]);
        const double b = std::max(sol.p_grid[i - 1], sol.p_grid[i]);
        sol.t_grid[i] = sol.t_grid[i - 1] + integrate(speed, a, b, kQuadTol, kQuadTol).value;
    }
    if (std::abs(sol.t_grid[n - 1] - gamma_tau) > 1e-6 * std::max(1.0, gamma_tau)) {
        std::ostringstream msg;
        msg << "build_optimal_protocol: traversal time " << sol.t_grid[n - 1]
            << " inconsistent with requested " << gamma_tau;
        throw NumericsError(msg.str());
    }
    sol.t_grid[n - 1] = gamma_tau;

    Protocol protocol;
    protocol.branch = branch;
    protocol.gamma_tau = gamma_tau;
    protocol.segments.emplace_back(JumpSegment{kLn2, sol.eps_grid.front()});
    RampSegment ramp;
    ramp.duration = gamma_tau;
    ramp.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ramp.samples.push_back({sol.t_grid[i], sol.eps_grid[i]});
    }
    protocol.segments.emplace_back(std::move(ramp));
    protocol.segments.emplace_back(JumpSegment{sol.eps_grid.back(), kLn2});
    validate(protocol);

    return {std::move(protocol), std::move(sol)};
}

Protocol naive_ramp(double gamma_tau, int branch) {
    check_branch(branch);
    if (!(gamma_tau > 0.0)) {
        throw std::invalid_argument("naive_ramp: gamma_tau must be positive");
    }
    const double start = branch == 0 ? kLn2 + 5.0 : kLn2 - 5.0;
    Protocol p;
    p.branch = branch;
    p.gamma_tau = gamma_tau;
    p.segments.emplace_back(JumpSegment{kLn2, start});
    RampSegment ramp;
    ramp.duration = gamma_tau;
    ramp.samples = {{0.0, start}, {gamma_tau, kLn2}};
    p.segments.emplace_back(std::move(ramp));
    validate(p);
    return p;
}

}  // namespace szilard
