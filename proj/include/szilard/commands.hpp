#pragma once

#include <string>
#include <vector>

#include "szilard/run_config.hpp"

/// Subcommand implementations behind the command-line front end.  Each
/// writes its files under config.output_dir and returns a process exit
/// code: 0 on success, 1 on computational failure, 2 on a usage-level
/// rejection that the argument parser could not catch.
///
/// File conventions shared by every command:
///  - CSV files open with one `#`-prefixed comment line carrying the exact
///    configuration and seed as a single JSON object, then the fixed header.
///  - JSON outputs embed the same configuration echo directly.
///  - Nothing records wall-clock time or worker count, so outputs are
///    byte-identical across runs and `--threads` settings.

namespace szilard {

struct CommandOptions {
    bool si = false;         // append SI-converted columns/keys
    unsigned n_threads = 1;  // worker pool size; never affects output bytes
};

/// Optimal protocol for one (duration, branch): pinned-format protocol JSON,
/// a t/level/occupation table CSV, and a one-object performance summary on
/// standard output.
int cmd_protocol(const RunConfig& config, double gamma_tau, int branch,
                 const CommandOptions& options);

/// Duration sweep: optimal and ramp performance per branch, theory rows and
/// optional Monte Carlo rows, plus a metadata JSON.
int cmd_sweep(const RunConfig& config, bool montecarlo, const CommandOptions& options);

/// Stochastic cycles on explicit protocol files: one file pins its branch,
/// two files run the fair-coin cycle.  Emits per-cycle samples CSV, a work
/// statistics JSON with both error-bar variants, and optionally a JSON-lines
/// trajectory dump.
int cmd_simulate(const RunConfig& config, const std::vector<std::string>& protocol_files,
                 bool dump_trajectories, const CommandOptions& options);

/// Level-shift sensitivity: per-(duration, shift) response CSV and a fitted
/// exponent summary JSON.
int cmd_drift(const RunConfig& config, int branch, const CommandOptions& options);

/// Built-in oracle suite; prints one report line per check.
int cmd_validate(const RunConfig& config, bool quick, const CommandOptions& options);

}  // namespace szilard
