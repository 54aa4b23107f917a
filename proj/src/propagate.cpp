#include "szilard/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "szilard/physics.hpp"

namespace szilard {

double SteppedProtocol::increment(std::size_t k) const {
    const std::size_t m = steps();
    if (k > m) throw std::out_of_range("SteppedProtocol::increment: edge index out of range");
    if (m == 0) return 0.0;
    if (k == 0) return level.front() - kLn2;
    if (k == m) return kLn2 - level.back();
    return level[k] - level[k - 1];
}

SteppedProtocol SteppedProtocol::shifted(double delta) const {
    SteppedProtocol out = *this;
    for (double& x : out.level) x += delta;
    return out;
}

SteppedProtocol compile(const Protocol& protocol, std::size_t min_steps) {
    validate(protocol, ValidateOptions{.require_rest_anchor = false});
    if (min_steps == 0) throw std::invalid_argument("compile: min_steps must be positive");

    SteppedProtocol out;
    out.branch = protocol.branch;
    out.gamma_tau = protocol.gamma_tau;
    out.t_edge.push_back(0.0);

    const double h_target = protocol.gamma_tau > 0.0
                                ? protocol.gamma_tau / static_cast<double>(min_steps)
                                : 0.0;
    double t_base = 0.0;
    for (const Segment& seg : protocol.segments) {
        const auto* ramp = std::get_if<RampSegment>(&seg);
        if (!ramp || ramp->duration == 0.0) continue;
        for (std::size_t i = 0; i + 1 < ramp->samples.size(); ++i) {
            const double ta = ramp->samples[i][0];
            const double tb = ramp->samples[i + 1][0];
            const double ea = ramp->samples[i][1];
            const double eb = ramp->samples[i + 1][1];
            const double span = tb - ta;
            const std::size_t n_sub =
                h_target > 0.0
                    ? std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / h_target - 1e-12)))
                    : 1;
            for (std::size_t s = 0; s < n_sub; ++s) {
                const double u0 = static_cast<double>(s) / static_cast<double>(n_sub);
                const double u1 = static_cast<double>(s + 1) / static_cast<double>(n_sub);
                const double um = 0.5 * (u0 + u1);
                out.level.push_back(ea + (eb - ea) * um);
                out.duration.push_back(span * (u1 - u0));
                out.t_edge.push_back(t_base + ta + span * u1);
            }
        }
        t_base += ramp->duration;
    }
    if (!out.t_edge.empty()) out.t_edge.back() = protocol.gamma_tau;  // kill rounding drift
    return out;
}

PropagationTable make_table(const SteppedProtocol& stepped, double degeneracy_ratio) {
    if (!(degeneracy_ratio > 0.0))
        throw std::invalid_argument("make_table: degeneracy ratio must be positive");
    PropagationTable table;
    table.ratio = degeneracy_ratio;
    const std::size_t m = stepped.steps();
    table.lambda.resize(m);
    table.p_star.resize(m);
    table.decay.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double f = fermi(stepped.level[k]);
        table.lambda[k] = degeneracy_ratio * f + 1.0 - f;
        table.p_star[k] = degeneracy_ratio * f / table.lambda[k];
        table.decay[k] = std::exp(-table.lambda[k] * stepped.duration[k]);
    }
    return table;
}

std::vector<double> occupation_at_edges(const SteppedProtocol& stepped,
                                        const PropagationTable& table, double p0) {
    if (!(p0 >= 0.0 && p0 <= 1.0))
        throw std::invalid_argument("occupation_at_edges: occupation outside [0, 1]");
    const std::size_t m = stepped.steps();
    std::vector<double> p(m + 1);
    p[0] = p0;
    for (std::size_t k = 0; k < m; ++k) {
        p[k + 1] = table.p_star[k] + (p[k] - table.p_star[k]) * table.decay[k];
    }
    return p;
}

std::vector<std::pair<double, double>> propagate_protocol(double p0,
                                                          const Protocol& protocol,
                                                          std::size_t grid_points,
                                                          double degeneracy_ratio) {
    if (grid_points < 2) throw std::invalid_argument("propagate_protocol: need at least 2 grid points");
    const SteppedProtocol stepped = compile(protocol, grid_points);
    const PropagationTable table = make_table(stepped, degeneracy_ratio);
    const std::vector<double> p = occupation_at_edges(stepped, table, p0);
    std::vector<std::pair<double, double>> out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) out[k] = {stepped.t_edge[k], p[k]};
    return out;
}

double conditional_propagator(const Protocol& protocol, double t_prime, double t,
                              std::size_t grid_points, double degeneracy_ratio) {
    if (!(t_prime >= 0.0) || !(t <= protocol.gamma_tau + 1e-12) || t < t_prime)
        throw std::invalid_argument("conditional_propagator: need 0 <= t_prime <= t <= gamma_tau");
    if (t == t_prime) return 1.0;

    const SteppedProtocol stepped = compile(protocol, grid_points);
    const PropagationTable table = make_table(stepped, degeneracy_ratio);

    double p = 1.0;
    double clock = t_prime;
    // First step whose edge interval contains t_prime.
    auto it = std::upper_bound(stepped.t_edge.begin(), stepped.t_edge.end(), t_prime);
    std::size_t k = (it == stepped.t_edge.begin())
                        ? 0
                        : static_cast<std::size_t>(it - stepped.t_edge.begin()) - 1;
    for (; k < stepped.steps() && clock < t; ++k) {
        const double step_end = stepped.t_edge[k + 1];
        const double dt = std::min(t, step_end) - clock;
        if (dt > 0.0) {
            p = table.p_star[k] + (p - table.p_star[k]) * std::exp(-table.lambda[k] * dt);
            clock += dt;
        }
    }
    return p;
}

}  // namespace szilard
