// Command-line front end: parses configuration (flags over optional
// key=value config file), then dispatches to the subcommand implementations.
// Exit codes: 0 success, 1 computational failure, 2 usage error.

#include <string>
#include <vector>

#include "CLI11.hpp"
#include "szilard/commands.hpp"
#include "szilard/run_config.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "Work-optimal finite-time driving for a two-level information engine:\n"
        "closed-form optimal protocols, stochastic cycle simulation, duration\n"
        "sweeps, and calibration-drift studies.  All core quantities are in\n"
        "reduced units (energies times beta, times times the escape rate)."};
    app.failure_message(CLI::FailureMessage::help);
    app.set_version_flag("--version", std::string("szilard ") + szilard::kVersion);
    app.set_config("--config", "", "Read options from a key=value file");
    app.require_subcommand(1);

    szilard::RunConfig config;
    szilard::CommandOptions options;
    app.add_option("--temperature-mk", config.temperature_mk,
                   "Bath temperature in millikelvin (SI conversion only)")
        ->capture_default_str();
    app.add_option("--gamma-in-hz", config.gamma_in_hz,
                   "Bare tunneling-in rate in Hz (SI conversion only)")
        ->capture_default_str();
    app.add_option("--gamma-out-hz", config.gamma_out_hz,
                   "Bare escape rate in Hz; sets the reduced time unit")
        ->capture_default_str();
    app.add_option("--tau", config.tau_list,
                   "Reduced cycle durations (repeatable or comma-separated); "
                   "default: 16 log-spaced points in [0.1, 10]")
        ->delimiter(',');
    app.add_option("--n-cycles", config.n_cycles, "Stochastic cycles per batch")
        ->capture_default_str();
    app.add_option("--seed", config.master_seed, "Master seed for all sampling")
        ->capture_default_str();
    app.add_option("--grid-points", config.grid_points,
                   "Occupation grid resolution for emitted protocols")
        ->capture_default_str();
    app.add_option("--quadrature-tol", config.quadrature_tol,
                   "Absolute/relative tolerance of the adaptive integrator")
        ->capture_default_str();
    app.add_option("--shift", config.drift_shifts,
                   "Level shifts for the drift study (repeatable); "
                   "default: 0, +/-0.01, +/-0.02, +/-0.05, +/-0.1")
        ->delimiter(',');
    app.add_option("--output-dir", config.output_dir, "Directory for emitted files")
        ->capture_default_str();
    app.add_option("--threads", options.n_threads,
                   "Worker threads; outputs are identical for any value")
        ->check(CLI::Range(1u, 256u));
    app.add_flag("--si", options.si,
                 "Append SI-converted columns (J, W) using the device constants");

    auto* protocol_cmd = app.add_subcommand(
        "protocol", "Emit the work-optimal protocol for one duration and branch");
    double gamma_tau = 1.0;
    int branch = 0;
    protocol_cmd->add_option("--gamma-tau", gamma_tau, "Reduced cycle duration")
        ->required()
        ->check(CLI::PositiveNumber);
    protocol_cmd->add_option("--branch", branch, "Measurement outcome served (0/1)")
        ->check(CLI::Range(0, 1));

    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Performance versus duration for optimal and ramp drives");
    bool montecarlo = false;
    sweep_cmd->add_flag("--montecarlo", montecarlo,
                        "Add sampled rows beside the theory rows");

    auto* simulate_cmd = app.add_subcommand(
        "simulate", "Run stochastic cycles on explicit protocol files");
    std::vector<std::string> protocol_files;
    simulate_cmd
        ->add_option("protocols", protocol_files,
                     "One protocol JSON (pinned branch) or two (full cycle)")
        ->required()
        ->expected(1, 2);
    bool dump_trajectories = false;
    simulate_cmd->add_flag("--dump-trajectories", dump_trajectories,
                           "Also write per-cycle jump times as JSON lines");

    auto* drift_cmd = app.add_subcommand(
        "drift", "Power/fluctuation response to a rigid level-calibration shift");
    int drift_branch = 0;
    drift_cmd->add_option("--branch", drift_branch, "Branch under study (0/1)")
        ->check(CLI::Range(0, 1));

    auto* validate_cmd =
        app.add_subcommand("validate", "Run the built-in numerical oracle suite");
    bool quick = false;
    validate_cmd->add_flag("--quick", quick, "Smaller sample sizes, looser bars");

    // Let global options (--seed, --output-dir, ...) appear after the
    // subcommand name as well as before it.
    for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (*protocol_cmd) return szilard::cmd_protocol(config, gamma_tau, branch, options);
    if (*sweep_cmd) return szilard::cmd_sweep(config, montecarlo, options);
    if (*simulate_cmd) {
        return szilard::cmd_simulate(config, protocol_files, dump_trajectories,
                                     options);
    }
    if (*drift_cmd) return szilard::cmd_drift(config, drift_branch, options);
    if (*validate_cmd) return szilard::cmd_validate(config, quick, options);
    return 2;
}
