#include "szilard/brute_force.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

#include "szilard/numerics.hpp"
#include "szilard/physics.hpp"
#include "szilard/propagate.hpp"
#include "szilard/stats.hpp"

namespace szilard {

namespace {

SteppedProtocol as_stepped(const std::vector<double>& levels, double gamma_tau,
                           int branch) {
    const std::size_t m = levels.size();
    SteppedProtocol s;
    s.branch = branch;
    s.gamma_tau = gamma_tau;
    s.level = levels;
    s.duration.assign(m, gamma_tau / static_cast<double>(m));
    s.t_edge.resize(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        s.t_edge[k] = gamma_tau * static_cast<double>(k) / static_cast<double>(m);
    }
    return s;
}

}  // namespace

double stepped_work_and_gradient(const std::vector<double>& levels, double gamma_tau,
                                 int branch, std::vector<double>* gradient) {
    if (levels.empty()) {
        throw std::invalid_argument("stepped_work_and_gradient: no levels");
    }
    const SteppedProtocol s = as_stepped(levels, gamma_tau, branch);
    const PropagationTable table = make_table(s);
    const double p0 = branch == 0 ? 0.0 : 1.0;
    const double work = work_deterministic(s, table, p0);
    if (gradient == nullptr) return work;

    const std::size_t m = levels.size();
    const std::vector<double> p = occupation_at_edges(s, table, p0);
    const double dt = gamma_tau / static_cast<double>(m);
    const double r = table.ratio;

    // Adjoint sweep: a[k] = dW/dp[k] including all downstream edges.
    std::vector<double> a(m + 1);
    a[m] = -s.increment(m);
    for (std::size_t k = m; k-- > 0;) {
        a[k] = -s.increment(k) + a[k + 1] * table.decay[k];
    }

    gradient->assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const double f = fermi(levels[j]);
        const double fp = -f * (1.0 - f);
        const double lambda = table.lambda[j];
        const double dpstar = r * fp / (lambda * lambda);
        const double ddecay = -dt * (r - 1.0) * fp * table.decay[j];
        (*gradient)[j] = (p[j + 1] - p[j]) +
                         a[j + 1] * ((1.0 - table.decay[j]) * dpstar +
                                     (p[j] - table.p_star[j]) * ddecay);
    }
    return work;
}

BruteForceResult brute_force_optimum(double gamma_tau, std::size_t n_steps,
                                     int branch) {
    if (branch != 0 && branch != 1) {
        throw std::invalid_argument("brute_force_optimum: branch must be 0 or 1");
    }
    if (!(gamma_tau > 0.0)) {
        throw std::invalid_argument("brute_force_optimum: gamma_tau must be positive");
    }
    if (n_steps < 8 || n_steps > 256) {
        throw std::invalid_argument("brute_force_optimum: n_steps must be in [8, 256]");
    }

    const double sign = branch == 0 ? 1.0 : -1.0;
    const std::size_t m = n_steps;

    std::vector<std::vector<double>> starts;
    starts.emplace_back(m, kLn2 + 2.0 * sign);  // flat offset hold
    std::vector<double> ramp(m);
    for (std::size_t j = 0; j < m; ++j) {
        // Mimics the linear comparison drive at step midpoints.
        ramp[j] = kLn2 + 5.0 * sign * (1.0 - (static_cast<double>(j) + 0.5) / m);
    }
    starts.push_back(std::move(ramp));
    std::mt19937_64 eng(splitmix64(0x62727574u));  // fixed seed: deterministic result
    std::uniform_real_distribution<double> ulevel(kLn2 - 1.0 + (sign < 0 ? -5.0 : 0.0),
                                                  kLn2 + 1.0 + (sign > 0 ? 5.0 : 0.0));
    for (int extra = 0; extra < 2; ++extra) {
        std::vector<double> random(m);
        for (double& x : random) x = ulevel(eng);
        starts.push_back(std::move(random));
    }

    const auto objective = [&](const std::vector<double>& x) {
        return -stepped_work_and_gradient(x, gamma_tau, branch, nullptr);
    };
    const auto objective_grad = [&](const std::vector<double>& x, std::vector<double>& g) {
        stepped_work_and_gradient(x, gamma_tau, branch, &g);
        for (double& v : g) v = -v;
    };

    BruteForceResult result;
    result.work = -1e300;
    for (const std::vector<double>& x0 : starts) {
        const MultiMinResult run =
            minimize_bfgs(objective, objective_grad, x0, 0.25, 1e-8, 4000);
        const double work = -run.value;
        if (work > result.work) {
            result.work = work;
            result.levels = run.x;
        }
    }
    // The line search may quit on no-progress before the gradient test
    // fires; judge stationarity of the best point directly instead.
    std::vector<double> grad_best;
    stepped_work_and_gradient(result.levels, gamma_tau, branch, &grad_best);
    double grad_norm = 0.0;
    for (double g : grad_best) grad_norm = std::max(grad_norm, std::abs(g));
    result.converged = grad_norm < 1e-6;

    Protocol protocol;
    protocol.branch = branch;
    protocol.gamma_tau = gamma_tau;
    const double dt = gamma_tau / static_cast<double>(m);
    protocol.segments.emplace_back(JumpSegment{kLn2, result.levels.front()});
    for (std::size_t j = 0; j < m; ++j) {
        if (j > 0) {
            protocol.segments.emplace_back(JumpSegment{result.levels[j - 1], result.levels[j]});
        }
        RampSegment hold;
        hold.duration = dt;
        hold.samples = {{0.0, result.levels[j]}, {dt, result.levels[j]}};
        protocol.segments.emplace_back(std::move(hold));
    }
    protocol.segments.emplace_back(JumpSegment{result.levels.back(), kLn2});
    validate(protocol);
    result.protocol = std::move(protocol);
    return result;
}

}  // namespace szilard
