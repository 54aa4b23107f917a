#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "szilard/physics.hpp"

/// User-facing run configuration. Everything the solver and sampler need is
/// reduced (beta-multiplied energies, escape-rate-scaled times); the device
/// constants here exist only so outputs can be converted to SI on request.

namespace szilard {

inline constexpr const char* kVersion = "1.0.0";

struct RunConfig {
    double temperature_mk = 180.0;
    double gamma_in_hz = 7.0;
    double gamma_out_hz = 3.5;
    std::vector<double> tau_list;  // reduced cycle durations; empty -> default grid
    std::size_t n_cycles = 10000;
    std::uint64_t master_seed = 42;
    std::size_t grid_points = 256;
    double quadrature_tol = 1e-10;
    std::vector<double> drift_shifts;  // empty -> default ladder
    std::string output_dir = "out";

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    /// tau_list, or the default 16-point logarithmic grid over [0.1, 10].
    std::vector<double> effective_tau_list() const;

    /// drift_shifts, or {0, +/-0.01, +/-0.02, +/-0.05, +/-0.1}.
    std::vector<double> effective_drift_shifts() const;

    PhysicalParams physical() const;
};

/// Multipliers taking reduced observables to SI:
///   work_J      = work_reduced * energy_joule
///   power_W     = power_reduced * power_watt
///   delta_p_SI  = delta_p_reduced * fluct_joule2_hz   (J^2 / s)
struct SiScales {
    double energy_joule;
    double power_watt;
    double fluct_joule2_hz;
};

SiScales si_scales(const RunConfig& config);

/// Deterministic key-ordered echo of the configuration for output metadata.
nlohmann::ordered_json config_json(const RunConfig& config);

}  // namespace szilard
