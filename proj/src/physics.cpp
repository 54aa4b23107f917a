#include "szilard/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace szilard {

PhysicalParams::PhysicalParams(double beta_, double gamma_in_hz, double gamma_out_hz)
    : beta(beta_), gamma_in_bare(gamma_in_hz), gamma_out_bare(gamma_out_hz) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("PhysicalParams: beta must be positive and finite");
    if (!(gamma_in_bare > 0.0) || !(gamma_out_bare > 0.0))
        throw std::invalid_argument("PhysicalParams: bare rates must be positive");
}

PhysicalParams PhysicalParams::from_temperature_mk(double temperature_mk,
                                                   double gamma_in_hz,
                                                   double gamma_out_hz) {
    if (!(temperature_mk > 0.0))
        throw std::invalid_argument("PhysicalParams: temperature must be positive");
    const double t_kelvin = temperature_mk * 1e-3;
    return PhysicalParams(1.0 / (kBoltzmann * t_kelvin), gamma_in_hz, gamma_out_hz);
}

double fermi(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("fermi: non-finite energy");
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

std::pair<double, double> rates(double x, const PhysicalParams& params) {
    const double f = fermi(x);
    return {params.gamma_in_bare * f, params.gamma_out_bare * (1.0 - f)};
}

double relaxation_rate(double x, double degeneracy_ratio) {
    const double f = fermi(x);
    return degeneracy_ratio * f + 1.0 - f;
}

double equilibrium_occupation(double x, double degeneracy_ratio) {
    const double f = fermi(x);
    return degeneracy_ratio * f / (degeneracy_ratio * f + 1.0 - f);
}

double propagate_constant(double p0, double x, double dt, double degeneracy_ratio) {
    if (!(dt >= 0.0)) throw std::invalid_argument("propagate_constant: negative duration");
    if (!(p0 >= 0.0 && p0 <= 1.0))
        throw std::invalid_argument("propagate_constant: occupation outside [0, 1]");
    const double f = fermi(x);
    const double lambda = degeneracy_ratio * f + 1.0 - f;
    const double p_star = degeneracy_ratio * f / lambda;
    const double p = p_star + (p0 - p_star) * std::exp(-lambda * dt);
    return std::clamp(p, 0.0, 1.0);
}

double voltage_to_energy(double v, const LeverArm& cal, const PhysicalParams& params) {
    if (!(cal.alpha > 0.0)) throw std::invalid_argument("voltage_to_energy: lever arm must be positive");
    return params.beta * cal.alpha * kElementaryCharge * (v - cal.v_ref) + kLn2;
}

double energy_to_voltage(double x, const LeverArm& cal, const PhysicalParams& params) {
    if (!(cal.alpha > 0.0)) throw std::invalid_argument("energy_to_voltage: lever arm must be positive");
    return cal.v_ref + (x - kLn2) / (params.beta * cal.alpha * kElementaryCharge);
}

}  // namespace szilard
