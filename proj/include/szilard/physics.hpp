#pragma once

#include <utility>

/// Two-level dot rate model in reduced units: energies are premultiplied by
/// beta, times by the bare escape rate, so the dynamics depend only on the
/// degeneracy ratio r = rate_in_bare / rate_out_bare:
///
///     dp/dt = r f(x) - (r f(x) + 1 - f(x)) p,      f(x) = 1/(1 + e^x)
///
/// The device this models has r close to 2 (spin degeneracy), but r stays a
/// parameter everywhere in this module.

namespace szilard {

inline constexpr double kLn2 = 0.6931471805599453094172321214581766;
inline constexpr double kBoltzmann = 1.380649e-23;        // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C

/// Dimensional anchor: bath temperature and bare tunneling rates.
/// reference_energy() is always recomputed from beta, never stored drifted.
struct PhysicalParams {
    double beta;            // 1/J
    double gamma_in_bare;   // Hz
    double gamma_out_bare;  // Hz

    PhysicalParams(double beta_, double gamma_in_hz, double gamma_out_hz);
    static PhysicalParams from_temperature_mk(double temperature_mk,
                                              double gamma_in_hz,
                                              double gamma_out_hz);

    /// E0 = kT ln 2, the level position with 50/50 equilibrium occupation.
    double reference_energy() const { return kLn2 / beta; }
    double degeneracy_ratio() const { return gamma_in_bare / gamma_out_bare; }
    double temperature_k() const { return 1.0 / (kBoltzmann * beta); }
};

/// Gate-voltage calibration: energy shifts linearly with voltage.
struct LeverArm {
    double alpha;  // dimensionless, > 0
    double v_ref;  // V at which the level sits at the reference energy
};

/// Fermi function 1/(1 + e^x); branch form keeps |x| up to ~700 exact.
double fermi(double x);

/// (rate_in, rate_out) in Hz at reduced energy x.
std::pair<double, double> rates(double x, const PhysicalParams& params);

/// Relaxation rate of p toward its fixed point, in reduced time units.
double relaxation_rate(double x, double degeneracy_ratio = 2.0);

/// Fixed point p* = r f / (r f + 1 - f) of the master equation.
double equilibrium_occupation(double x, double degeneracy_ratio = 2.0);

/// Exact propagation at frozen level: p(dt) = p* + (p0 - p*) e^{-lambda dt}.
double propagate_constant(double p0, double x, double dt,
                          double degeneracy_ratio = 2.0);

/// Reduced energy at gate voltage v:  beta*alpha*q_e*(v - v_ref) + ln 2.
double voltage_to_energy(double v, const LeverArm& cal, const PhysicalParams& params);
double energy_to_voltage(double x, const LeverArm& cal, const PhysicalParams& params);

}  // namespace szilard
