#include "szilard/commands.hpp"

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <gsl/gsl_version.h>

#include "json.hpp"
#include "szilard/analysis.hpp"
#include "szilard/optimal.hpp"
#include "szilard/protocol.hpp"
#include "szilard/selftest.hpp"
#include "szilard/simulate.hpp"
#include "szilard/stats.hpp"

namespace szilard {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

/// Shortest exact decimal form; used for every CSV number so identical
/// values always serialize to identical bytes.
std::string fmt(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

ordered_json base_metadata(const RunConfig& config, const char* command) {
    ordered_json meta;
    meta["command"] = command;
    meta["version"] = kVersion;
    meta["gsl_version"] = GSL_VERSION;
    meta["seed"] = config.master_seed;
    meta["config"] = config_json(config);
    return meta;
}

/// Single `#` comment line placed above the CSV header: the exact run
/// configuration, so every file describes the run that produced it.
std::string metadata_comment(const RunConfig& config, const char* command) {
    return "# " + base_metadata(config, command).dump() + "\n";
}

fs::path prepare_output(const RunConfig& config) {
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("short write to " + path.string());
}

void append_si_json(ordered_json& j, const SiScales& si, double work, double power,
                    double fluctuation) {
    j["work_joule"] = work * si.energy_joule;
    j["power_watt"] = power * si.power_watt;
    j["delta_p_si"] = fluctuation * si.fluct_joule2_hz;
}

std::string performance_header(bool with_si) {
    std::string header =
        "gamma_tau,branch,work_reduced,efficiency,power_reduced,delta_p_reduced,"
        "fdr_residual,source";
    if (with_si) header += ",work_joule,power_watt,delta_p_si";
    return header + "\n";
}

std::string performance_line(double gamma_tau, int branch, double work,
                             double efficiency_value, double power, double fluctuation,
                             double fdr, const char* source, const SiScales* si) {
    std::string line = fmt(gamma_tau) + "," + std::to_string(branch) + "," + fmt(work) +
                       "," + fmt(efficiency_value) + "," + fmt(power) + "," +
                       fmt(fluctuation) + "," + fmt(fdr) + "," + source;
    if (si != nullptr) {
        line += "," + fmt(work * si->energy_joule) + "," + fmt(power * si->power_watt) +
                "," + fmt(fluctuation * si->fluct_joule2_hz);
    }
    return line + "\n";
}

int fail(const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
}

}  // namespace

int cmd_protocol(const RunConfig& config, double gamma_tau, int branch,
                 const CommandOptions& options) {
    try {
        config.validate();
        if (!(gamma_tau > 0.0)) {
            throw std::invalid_argument("gamma_tau must be positive");
        }
        if (branch != 0 && branch != 1) {
            throw std::invalid_argument("branch must be 0 or 1");
        }
        const OptimalProtocol built =
            build_optimal_protocol(gamma_tau, config.grid_points, branch);
        const EnginePerformance perf = performance_theory(built.protocol);

        const fs::path dir = prepare_output(config);
        const std::string tag = "protocol_branch" + std::to_string(branch);
        const fs::path json_path = dir / (tag + ".json");
        const fs::path csv_path = dir / (tag + ".csv");
        save_protocol(json_path.string(), built.protocol);

        std::string csv = metadata_comment(config, "protocol");
        csv += "t_reduced,beta_eps,p_theory\n";
        const OptimalSolution& sol = built.solution;
        for (std::size_t i = 0; i < sol.t_grid.size(); ++i) {
            csv += fmt(sol.t_grid[i]) + "," + fmt(sol.eps_grid[i]) + "," +
                   fmt(sol.p_grid[i]) + "\n";
        }
        write_text(csv_path, csv);

        ordered_json summary;
        summary["gamma_tau"] = gamma_tau;
        summary["branch"] = branch;
        summary["kappa_tau"] = sol.kappa_tau;
        summary["saturated"] = sol.saturated;
        summary["work_reduced"] = perf.work;
        summary["efficiency"] = perf.efficiency;
        summary["power_reduced"] = perf.power;
        summary["delta_p_reduced"] = perf.fluctuation;
        summary["fdr_residual"] = perf.fdr;
        if (options.si) {
            append_si_json(summary, si_scales(config), perf.work, perf.power,
                           perf.fluctuation);
        }
        summary["files"] = {json_path.string(), csv_path.string()};
        std::cout << summary.dump(2) << "\n";
        return 0;
    } catch (const std::exception& err) {
        return fail(err);
    }
}

int cmd_sweep(const RunConfig& config, bool montecarlo, const CommandOptions& options) {
    try {
        config.validate();
        if (montecarlo && config.n_cycles == 0) {
            std::cerr << "error: --montecarlo requires n_cycles > 0\n";
            return 2;
        }
        const std::vector<double> taus = config.effective_tau_list();
        const std::vector<SweepRow> rows =
            sweep(taus, montecarlo, config.n_cycles, config.master_seed,
                  options.n_threads, config.grid_points);

        const SiScales si = si_scales(config);
        const SiScales* si_ptr = options.si ? &si : nullptr;
        const fs::path dir = prepare_output(config);

        ordered_json meta = base_metadata(config, "sweep");
        meta["montecarlo"] = montecarlo;
        meta["branch_averaging"] =
            "cycle figures average the two measurement branches with weight 1/2 "
            "each; the mixed-work variance adds the squared branch-mean split "
            "over four";
        meta["error_bars"] =
            "central-moment variance-of-variance is authoritative; the "
            "raw-moment variant is reported beside it for comparison";
        ordered_json failed_rows = ordered_json::array();
        ordered_json estimators = ordered_json::array();

        std::string opt_csv = metadata_comment(config, "sweep");
        std::string naive_csv = opt_csv;
        opt_csv += performance_header(options.si);
        naive_csv += performance_header(options.si);
        for (const SweepRow& row : rows) {
            if (row.failed) {
                failed_rows.push_back(
                    {{"gamma_tau", row.gamma_tau}, {"note", row.note}});
                continue;
            }
            for (int b : {0, 1}) {
                const EnginePerformance& to = row.optimal[b];
                opt_csv += performance_line(row.gamma_tau, b, to.work, to.efficiency,
                                            to.power, to.fluctuation, to.fdr, "theory",
                                            si_ptr);
                const EnginePerformance& tn = row.naive[b];
                naive_csv += performance_line(row.gamma_tau, b, tn.work, tn.efficiency,
                                              tn.power, tn.fluctuation, tn.fdr,
                                              "theory", si_ptr);
                if (!row.has_montecarlo) continue;
                const McPerformance& mo = row.optimal_mc[b];
                opt_csv += performance_line(row.gamma_tau, b, mo.work, mo.efficiency,
                                            mo.power, mo.fluctuation, mo.fdr,
                                            "montecarlo", si_ptr);
                const McPerformance& mn = row.naive_mc[b];
                naive_csv += performance_line(row.gamma_tau, b, mn.work, mn.efficiency,
                                              mn.power, mn.fluctuation, mn.fdr,
                                              "montecarlo", si_ptr);
                for (const auto* mc : {&mo, &mn}) {
                    estimators.push_back({{"gamma_tau", row.gamma_tau},
                                          {"branch", b},
                                          {"protocol", mc == &mo ? "optimal" : "naive"},
                                          {"n_samples", mc->n_cycles},
                                          {"work_std_error", mc->work_std_error},
                                          {"fluctuation_std_error",
                                           mc->fluctuation_std_error},
                                          {"fluctuation_std_error_raw",
                                           mc->fluctuation_std_error_raw},
                                          {"raw_clamped", mc->raw_clamped}});
                }
            }
        }

        const fs::path opt_path = dir / "sweep.csv";
        const fs::path naive_path = dir / "sweep_naive.csv";
        const fs::path meta_path = dir / "sweep_metadata.json";
        write_text(opt_path, opt_csv);
        write_text(naive_path, naive_csv);
        meta["files"] = {opt_path.string(), naive_path.string()};
        meta["failed_rows"] = failed_rows;
        if (montecarlo) meta["montecarlo_estimators"] = estimators;
        write_text(meta_path, meta.dump(2) + "\n");
        std::cerr << "wrote " << opt_path.string() << ", " << naive_path.string()
                  << ", " << meta_path.string() << "\n";
        return 0;
    } catch (const std::exception& err) {
        return fail(err);
    }
}

int cmd_simulate(const RunConfig& config, const std::vector<std::string>& protocol_files,
                 bool dump_trajectories, const CommandOptions& options) {
    try {
        config.validate();
        if (protocol_files.empty() || protocol_files.size() > 2) {
            std::cerr << "error: simulate needs one protocol file (pinned branch) "
                         "or two (full cycle)\n";
            return 2;
        }
        if (config.n_cycles < 5) {
            throw std::invalid_argument(
                "n_cycles must be at least 5 for variance error bars");
        }
        std::vector<Protocol> protocols;
        for (const std::string& file : protocol_files) {
            Protocol p = load_protocol(file);
            validate(p);
            protocols.push_back(std::move(p));
        }

        std::vector<CycleResult> results;
        double gamma_tau = protocols[0].gamma_tau;
        if (protocols.size() == 1) {
            results = run_batch_single(protocols[0], config.n_cycles,
                                       config.master_seed, options.n_threads);
        } else {
            if (protocols[0].branch == protocols[1].branch) {
                throw std::invalid_argument(
                    "the two protocol files must serve different branches");
            }
            if (protocols[0].branch == 1) std::swap(protocols[0], protocols[1]);
            results = run_batch(protocols[0], protocols[1], config.n_cycles,
                                config.master_seed, options.n_threads);
        }

        const std::vector<double> works = works_of(results);
        const auto [mean, se] = mean_estimator(works);
        const VarianceEstimate var = variance_estimator(works);
        const double fluctuation = var.variance / gamma_tau;
        const FdrResidual fdr = fdr_residual(mean, fluctuation, gamma_tau);

        const SiScales si = si_scales(config);
        const fs::path dir = prepare_output(config);
        std::string csv = metadata_comment(config, "simulate");
        csv += "cycle_index,measured_bit,n_jumps,work_reduced";
        if (options.si) csv += ",work_joule";
        csv += "\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            const CycleResult& cycle = results[i];
            csv += std::to_string(i) + "," + std::to_string(cycle.measured_bit) + "," +
                   std::to_string(cycle.trajectory.jump_times.size()) + "," +
                   fmt(cycle.work);
            if (options.si) csv += "," + fmt(cycle.work * si.energy_joule);
            csv += "\n";
        }
        const fs::path csv_path = dir / "samples.csv";
        write_text(csv_path, csv);

        ordered_json stats = base_metadata(config, "simulate");
        stats["protocol_files"] = protocol_files;
        stats["gamma_tau"] = gamma_tau;
        stats["n_samples"] = works.size();
        stats["mean_work_reduced"] = mean;
        stats["work_std_error"] = se;
        stats["work_variance"] = var.variance;
        stats["variance_std_error"] = var.std_error;
        stats["variance_std_error_raw"] = var.std_error_raw;
        stats["raw_clamped"] = var.raw_clamped;
        stats["delta_p_reduced"] = fluctuation;
        stats["delta_p_std_error"] = var.std_error / gamma_tau;
        stats["fdr_residual"] = fdr.value;
        stats["fdr_absolute"] = fdr.absolute;
        if (options.si) {
            append_si_json(stats, si, mean, mean / gamma_tau, fluctuation);
        }
        const fs::path stats_path = dir / "work_stats.json";
        write_text(stats_path, stats.dump(2) + "\n");

        if (dump_trajectories) {
            std::string dump;
            for (std::size_t i = 0; i < results.size(); ++i) {
                ordered_json line;
                line["cycle_index"] = i;
                line["measured_bit"] = results[i].measured_bit;
                line["work_reduced"] = results[i].work;
                line["jump_times"] = results[i].trajectory.jump_times;
                dump += line.dump() + "\n";
            }
            write_text(dir / "trajectories.jsonl", dump);
        }
        std::cerr << "wrote " << csv_path.string() << ", " << stats_path.string()
                  << "\n";
        return 0;
    } catch (const std::exception& err) {
        return fail(err);
    }
}

int cmd_drift(const RunConfig& config, int branch, const CommandOptions& options) {
    (void)options;
    try {
        config.validate();
        if (branch != 0 && branch != 1) {
            throw std::invalid_argument("branch must be 0 or 1");
        }
        const std::vector<double> taus =
            config.tau_list.empty() ? std::vector<double>{0.1, 1.0, 10.0}
                                    : config.tau_list;
        const std::vector<double> shifts = config.effective_drift_shifts();

        std::string csv = metadata_comment(config, "drift");
        csv += "gamma_tau,beta_delta,rel_power_change,rel_fluct_change\n";
        ordered_json fits = ordered_json::array();
        for (double gt : taus) {
            const DriftResult drift =
                drift_sensitivity(gt, shifts, branch, config.grid_points);
            for (std::size_t i = 0; i < drift.shift_values.size(); ++i) {
                csv += fmt(gt) + "," + fmt(drift.shift_values[i]) + "," +
                       fmt(drift.rel_power_change[i]) + "," +
                       fmt(drift.rel_fluct_change[i]) + "\n";
            }
            fits.push_back({{"gamma_tau", gt},
                            {"power_exponent", drift.power_exponent},
                            {"fluct_exponent", drift.fluct_exponent}});
        }

        const fs::path dir = prepare_output(config);
        const fs::path csv_path = dir / "drift.csv";
        const fs::path summary_path = dir / "drift_summary.json";
        write_text(csv_path, csv);
        ordered_json summary = base_metadata(config, "drift");
        summary["branch"] = branch;
        summary["exponents"] = fits;
        write_text(summary_path, summary.dump(2) + "\n");
        std::cerr << "wrote " << csv_path.string() << ", " << summary_path.string()
                  << "\n";
        return 0;
    } catch (const std::exception& err) {
        return fail(err);
    }
}

int cmd_validate(const RunConfig& config, bool quick, const CommandOptions& options) {
    try {
        config.validate();
        const std::vector<CheckResult> results =
            run_selftest(quick, options.n_threads);
        std::size_t failures = 0;
        for (const CheckResult& check : results) {
            std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << ": "
                      << check.detail << "\n";
            if (!check.passed) ++failures;
        }
        if (failures == 0) {
            std::cout << "all " << results.size() << " checks passed\n";
            return 0;
        }
        std::cout << failures << " of " << results.size() << " checks failed\n";
        return 1;
    } catch (const std::exception& err) {
        return fail(err);
    }
}

}  // namespace szilard
