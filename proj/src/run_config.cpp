#include "szilard/run_config.hpp"

#include <stdexcept>

#include "szilard/analysis.hpp"

namespace szilard {

void RunConfig::validate() const {
    if (!(temperature_mk > 0.0)) {
        throw std::invalid_argument("temperature_mK must be positive");
    }
    if (!(gamma_in_hz > 0.0)) {
        throw std::invalid_argument("gamma_in_hz must be positive");
    }
    if (!(gamma_out_hz > 0.0)) {
        throw std::invalid_argument("gamma_out_hz must be positive");
    }
    for (double tau : tau_list) {
        if (!(tau > 0.0)) {
            throw std::invalid_argument("tau_list entries must be positive");
        }
    }
    if (grid_points < 16) {
        throw std::invalid_argument("grid_points must be at least 16");
    }
    if (!(quadrature_tol > 0.0) || quadrature_tol > 1e-4) {
        throw std::invalid_argument("quadrature_tol must lie in (0, 1e-4]");
    }
    if (output_dir.empty()) {
        throw std::invalid_argument("output_dir must not be empty");
    }
}

std::vector<double> RunConfig::effective_tau_list() const {
    if (!tau_list.empty()) return tau_list;
    return log_spaced(0.1, 10.0, 16);
}

std::vector<double> RunConfig::effective_drift_shifts() const {
    if (!drift_shifts.empty()) return drift_shifts;
    return {-0.1, -0.05, -0.02, -0.01, 0.0, 0.01, 0.02, 0.05, 0.1};
}

PhysicalParams RunConfig::physical() const {
    return PhysicalParams::from_temperature_mk(temperature_mk, gamma_in_hz,
                                               gamma_out_hz);
}

SiScales si_scales(const RunConfig& config) {
    const double kt = kBoltzmann * config.temperature_mk * 1e-3;
    return {kt, kt * config.gamma_out_hz, kt * kt * config.gamma_out_hz};
}

nlohmann::ordered_json config_json(const RunConfig& config) {
    nlohmann::ordered_json j;
    j["temperature_mK"] = config.temperature_mk;
    j["gamma_in_hz"] = config.gamma_in_hz;
    j["gamma_out_hz"] = config.gamma_out_hz;
    j["tau_list"] = config.effective_tau_list();
    j["n_cycles"] = config.n_cycles;
    j["master_seed"] = config.master_seed;
    j["grid_points"] = config.grid_points;
    j["quadrature_tol"] = config.quadrature_tol;
    j["drift_shifts"] = config.effective_drift_shifts();
    j["output_dir"] = config.output_dir;
    return j;
}

}  // namespace szilard
