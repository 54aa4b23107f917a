#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

// Black-box tests of the command-line binary: every case spawns the real
// executable in a scratch directory and inspects exit code, streams, and
// emitted files.

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("szilard_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args, const fs::path& workdir) {
    const fs::path out_file = workdir / "_stdout.txt";
    const fs::path err_file = workdir / "_stderr.txt";
    const std::string command = "cd '" + workdir.string() + "' && '" +
                                SZILARD_CLI_PATH + "' " + args + " > '" +
                                out_file.string() + "' 2> '" + err_file.string() +
                                "'";
    const int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file(out_file);
    result.err = read_file(err_file);
    return result;
}

std::vector<std::string> data_rows(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(line);
    }
    return rows;  // rows[0] is the header
}

}  // namespace

TEST_CASE("protocol command emits files, summary, and is deterministic") {
    const fs::path dir = scratch_dir("protocol");
    const std::string args = "protocol --gamma-tau 1 --branch 0 --output-dir out";
    const CliResult first = run_cli(args, dir);
    REQUIRE(first.exit_code == 0);

    const json summary = json::parse(first.out);
    CHECK(summary["work_reduced"].get<double>() ==
          doctest::Approx(0.205006).epsilon(1e-3));
    CHECK(summary["gamma_tau"] == 1.0);
    CHECK(summary["branch"] == 0);

    const json protocol = json::parse(read_file(dir / "out/protocol_branch0.json"));
    CHECK(protocol["segments"][0]["kind"] == "jump");

    const std::string table = read_file(dir / "out/protocol_branch0.csv");
    CHECK(data_rows(table)[0] == "t_reduced,beta_eps,p_theory");
    CHECK(table.rfind("# {", 0) == 0);  // self-describing comment line

    const CliResult second = run_cli(args, dir);
    REQUIRE(second.exit_code == 0);
    CHECK(second.out == first.out);
    CHECK(read_file(dir / "out/protocol_branch0.csv") == table);
}

TEST_CASE("bad arguments are usage errors and leave no files") {
    const fs::path dir = scratch_dir("badargs");
    CHECK(run_cli("protocol --gamma-tau -1 --output-dir out", dir).exit_code == 2);
    CHECK_FALSE(fs::exists(dir / "out"));
    CHECK(run_cli("frobnicate", dir).exit_code == 2);
    const CliResult version = run_cli("--version", dir);
    CHECK(version.exit_code == 0);
    CHECK(version.out.find("szilard") != std::string::npos);
}

TEST_CASE("sweep emits the pinned schema with one row per duration and branch") {
    const fs::path dir = scratch_dir("sweep");
    const CliResult result =
        run_cli("sweep --tau 0.5,2 --output-dir out --grid-points 128", dir);
    REQUIRE(result.exit_code == 0);

    const std::string optimal_csv = read_file(dir / "out/sweep.csv");
    const std::string naive_csv = read_file(dir / "out/sweep_naive.csv");
    const auto opt_rows = data_rows(optimal_csv);
    const auto naive_rows = data_rows(naive_csv);
    REQUIRE(opt_rows.size() == 1 + 4);  // header + 2 durations x 2 branches
    REQUIRE(naive_rows.size() == opt_rows.size());
    CHECK(opt_rows[0] ==
          "gamma_tau,branch,work_reduced,efficiency,power_reduced,delta_p_reduced,"
          "fdr_residual,source");

    for (std::size_t i = 1; i < opt_rows.size(); ++i) {
        std::istringstream opt_line(opt_rows[i]), naive_line(naive_rows[i]);
        std::string opt_cell, naive_cell;
        std::vector<double> opt_vals, naive_vals;
        while (std::getline(opt_line, opt_cell, ',') &&
               std::getline(naive_line, naive_cell, ',')) {
            if (opt_cell == "theory") break;
            opt_vals.push_back(std::stod(opt_cell));
            naive_vals.push_back(std::stod(naive_cell));
        }
        REQUIRE(opt_vals.size() == 7);
        CHECK(opt_vals[0] == naive_vals[0]);  // same duration
        CHECK(opt_vals[1] == naive_vals[1]);  // same branch
        CHECK(opt_vals[2] > naive_vals[2]);   // optimal work dominates
    }

    const json meta = json::parse(read_file(dir / "out/sweep_metadata.json"));
    CHECK(meta["seed"] == 42);
    CHECK(meta["config"]["grid_points"] == 128);
    CHECK(meta["failed_rows"].empty());
}

TEST_CASE("monte-carlo sweep bytes do not depend on the thread count") {
    const fs::path dir = scratch_dir("sweepdet");
    const std::string base =
        "sweep --tau 1 --montecarlo --n-cycles 300 --seed 9 --grid-points 64 "
        "--output-dir out --threads ";
    REQUIRE(run_cli(base + "1", dir).exit_code == 0);
    const std::string csv1 = read_file(dir / "out/sweep.csv");
    const std::string meta1 = read_file(dir / "out/sweep_metadata.json");
    REQUIRE(run_cli(base + "3", dir).exit_code == 0);
    CHECK(read_file(dir / "out/sweep.csv") == csv1);
    CHECK(read_file(dir / "out/sweep_metadata.json") == meta1);
    CHECK(data_rows(csv1).size() == 1 + 2 * 2);  // theory + sampled, two branches
}

TEST_CASE("simulate on one protocol pins the branch and reports both error bars") {
    const fs::path dir = scratch_dir("simone");
    REQUIRE(run_cli("protocol --gamma-tau 1 --branch 1 --output-dir out", dir)
                .exit_code == 0);
    const CliResult result = run_cli(
        "simulate out/protocol_branch1.json --n-cycles 50 --seed 3 --output-dir out",
        dir);
    REQUIRE(result.exit_code == 0);

    const auto rows = data_rows(read_file(dir / "out/samples.csv"));
    REQUIRE(rows.size() == 1 + 50);
    CHECK(rows[0] == "cycle_index,measured_bit,n_jumps,work_reduced");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].substr(rows[i].find(',') + 1, 1) == "1");  // pinned bit
    }

    const json stats = json::parse(read_file(dir / "out/work_stats.json"));
    CHECK(stats["n_samples"] == 50);
    CHECK(stats.contains("variance_std_error"));
    CHECK(stats.contains("variance_std_error_raw"));
    CHECK(stats.contains("raw_clamped"));
    CHECK(stats["gamma_tau"] == 1.0);

    // Re-running the exact command reproduces the files byte for byte.
    const std::string stats_text = read_file(dir / "out/work_stats.json");
    REQUIRE(run_cli("simulate out/protocol_branch1.json --n-cycles 50 --seed 3 "
                    "--output-dir out",
                    dir)
                .exit_code == 0);
    CHECK(read_file(dir / "out/work_stats.json") == stats_text);
}

TEST_CASE("simulate on two protocols runs the fair-coin cycle") {
    const fs::path dir = scratch_dir("simtwo");
    REQUIRE(run_cli("protocol --gamma-tau 0.5 --branch 0 --output-dir out", dir)
                .exit_code == 0);
    REQUIRE(run_cli("protocol --gamma-tau 0.5 --branch 1 --output-dir out", dir)
                .exit_code == 0);
    const CliResult result =
        run_cli("simulate out/protocol_branch0.json out/protocol_branch1.json "
                "--n-cycles 200 --seed 12 --output-dir out --dump-trajectories",
                dir);
    REQUIRE(result.exit_code == 0);

    const auto rows = data_rows(read_file(dir / "out/samples.csv"));
    REQUIRE(rows.size() == 1 + 200);
    int bits[2] = {0, 0};
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const std::string bit = rows[i].substr(rows[i].find(',') + 1, 1);
        REQUIRE((bit == "0" || bit == "1"));
        ++bits[bit == "1" ? 1 : 0];
    }
    CHECK(bits[0] > 0);
    CHECK(bits[1] > 0);

    std::ifstream jsonl(dir / "out/trajectories.jsonl");
    std::string line;
    std::size_t n_lines = 0;
    while (std::getline(jsonl, line)) {
        const json record = json::parse(line);
        CHECK(record.contains("jump_times"));
        ++n_lines;
    }
    CHECK(n_lines == 200);
}

TEST_CASE("malformed protocol files fail naming the field") {
    const fs::path dir = scratch_dir("simbad");
    {
        std::ofstream bad(dir / "bad.json");
        bad << "{\"branch\": 0}";
    }
    const CliResult result =
        run_cli("simulate bad.json --output-dir out --n-cycles 10", dir);
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("gamma_tau") != std::string::npos);
    CHECK(run_cli("simulate --output-dir out", dir).exit_code == 2);
}

TEST_CASE("drift emits the response table and pinned exponent keys") {
    const fs::path dir = scratch_dir("drift");
    const CliResult result =
        run_cli("drift --tau 1 --branch 0 --grid-points 64 --output-dir out", dir);
    REQUIRE(result.exit_code == 0);

    const auto rows = data_rows(read_file(dir / "out/drift.csv"));
    REQUIRE(rows.size() == 1 + 9);  // default shift ladder
    CHECK(rows[0] == "gamma_tau,beta_delta,rel_power_change,rel_fluct_change");

    const json summary = json::parse(read_file(dir / "out/drift_summary.json"));
    REQUIRE(summary["exponents"].size() == 1);
    CHECK(summary["exponents"][0].contains("power_exponent"));
    CHECK(summary["exponents"][0].contains("fluct_exponent"));
    CHECK(summary["exponents"][0]["power_exponent"].get<double>() ==
          doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("config file values apply and explicit flags override them") {
    const fs::path dir = scratch_dir("config");
    {
        std::ofstream conf(dir / "run.conf");
        conf << "seed=77\ngrid-points=128\n";
    }
    REQUIRE(run_cli("--config run.conf protocol --gamma-tau 0.4 --output-dir a", dir)
                .exit_code == 0);
    const std::string table_a = read_file(dir / "a/protocol_branch0.csv");
    const json meta_a = json::parse(table_a.substr(2, table_a.find('\n') - 2));
    CHECK(meta_a["seed"] == 77);
    CHECK(meta_a["config"]["grid_points"] == 128);

    REQUIRE(run_cli("--config run.conf --seed 99 protocol --gamma-tau 0.4 "
                    "--output-dir b",
                    dir)
                .exit_code == 0);
    const std::string table_b = read_file(dir / "b/protocol_branch0.csv");
    const json meta_b = json::parse(table_b.substr(2, table_b.find('\n') - 2));
    CHECK(meta_b["seed"] == 99);
}

TEST_CASE("si flag appends converted columns that round-trip exactly") {
    const fs::path dir = scratch_dir("si");
    const CliResult result = run_cli(
        "protocol --gamma-tau 1 --si --temperature-mk 200 --output-dir out", dir);
    REQUIRE(result.exit_code == 0);
    const json summary = json::parse(result.out);
    const double kt = 1.380649e-23 * 0.200;
    const double back = summary["work_joule"].get<double>() / kt;
    CHECK(back == doctest::Approx(summary["work_reduced"].get<double>())
                      .epsilon(1e-12));
    CHECK(summary["power_watt"].get<double>() ==
          doctest::Approx(summary["power_reduced"].get<double>() * kt * 3.5)
              .epsilon(1e-12));
}

TEST_CASE("validate --quick reports every oracle check as passing") {
    const fs::path dir = scratch_dir("validate");
    const CliResult result = run_cli("validate --quick --threads 2", dir);
    REQUIRE(result.exit_code == 0);
    std::size_t passes = 0;
    std::istringstream out(result.out);
    std::string line;
    while (std::getline(out, line)) {
        if (line.rfind("[PASS]", 0) == 0) ++passes;
        CHECK(line.rfind("[FAIL]", 0) != 0);
    }
    CHECK(passes == 5);
}
