// Command-line front end: instance solving, exact distribution dumps,
// parameter sweeps, and the self-test suite.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "hbs/cli.hpp"

namespace {

int write_or_print(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return 1;
    }
    out << text;
    return 0;
}

std::vector<std::uint32_t> parse_uint_list(const std::string& csv) {
    std::vector<std::uint32_t> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        const std::size_t next = csv.find(',', pos);
        out.push_back(static_cast<std::uint32_t>(std::stoul(csv.substr(pos, next - pos))));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact simulator and solver for the hidden Borel subgroup problem over GL_n(F_q) and SL_n(F_q)"};
    app.require_subcommand(1);

    hbs::RunConfig cfg;
    std::string mode_str = "gl", backend_str = "exact", out_path, summary_path;
    std::string n_list_str = "2,3", q_list_str = "2,3,4,5";

    auto add_common = [&](CLI::App* cmd, bool with_field) {
        cmd->add_option("--seed", cfg.seed, "master RNG seed; the only entropy source");
        if (with_field) {
            cmd->add_option("--p", cfg.p, "field characteristic (prime)");
            cmd->add_option("--r", cfg.r, "extension degree");
            cmd->add_option("--n", cfg.n, "matrix degree")->check(CLI::PositiveNumber);
        }
        cmd->add_option("--out", out_path, "output file (default: stdout)");
    };

    CLI::App* solve = app.add_subcommand("solve", "generate and solve random instances");
    add_common(solve, true);
    solve->add_option("--mode", mode_str, "gl | sl")->check(CLI::IsMember({"gl", "sl"}));
    solve->add_option("--trials", cfg.trials, "number of instances")->check(CLI::PositiveNumber);
    solve->add_option("--max-rounds", cfg.max_rounds, "per-level round budget (0 = auto)");
    solve->add_option("--backend", backend_str, "exact | brute sampler")
        ->check(CLI::IsMember({"exact", "brute"}));
    solve->add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

    CLI::App* dist = app.add_subcommand("exact-dist", "dump the exact measurement law as CSV");
    add_common(dist, true);

    CLI::App* sweep = app.add_subcommand("sweep", "solve over an (n, q) grid and compare to predictions");
    add_common(sweep, false);
    sweep->add_option("--n-list", n_list_str, "comma-separated degrees");
    sweep->add_option("--q-list", q_list_str, "comma-separated prime powers");
    sweep->add_option("--mode", mode_str, "gl | sl")->check(CLI::IsMember({"gl", "sl"}));
    sweep->add_option("--trials", cfg.trials, "instances per grid cell")->check(CLI::PositiveNumber);
    sweep->add_option("--max-rounds", cfg.max_rounds, "per-level round budget (0 = auto)");
    sweep->add_option("--backend", backend_str, "exact | brute sampler")
        ->check(CLI::IsMember({"exact", "brute"}));
    sweep->add_option("--summary", summary_path, "aggregate CSV file (default: stdout)");

    CLI::App* selftest = app.add_subcommand("selftest", "run the acceptance criteria and invariant suite");
    selftest->add_option("--out", out_path, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? hbs::kExitOk : hbs::kExitUsage;
    }

    cfg.mode = mode_str == "sl" ? hbs::OracleMode::SL : hbs::OracleMode::GL;
    cfg.backend = backend_str == "brute" ? hbs::SolveBackend::BruteSampler : hbs::SolveBackend::ExactSampler;

    try {
        hbs::CommandResult result;
        if (solve->parsed()) {
            result = hbs::run_solve(cfg);
        } else if (dist->parsed()) {
            result = hbs::run_exact_dist(cfg);
        } else if (sweep->parsed()) {
            cfg.sweep_n.clear();
            for (std::uint32_t n : parse_uint_list(n_list_str)) cfg.sweep_n.push_back(static_cast<int>(n));
            cfg.sweep_q = parse_uint_list(q_list_str);
            result = hbs::run_sweep(cfg);
            if (write_or_print(result.primary, out_path) != 0) return hbs::kExitUsage;
            if (write_or_print(result.summary, summary_path) != 0) return hbs::kExitUsage;
            std::cerr << (result.exit_code == hbs::kExitOk ? "sweep complete\n" : "sweep had failures\n");
            return result.exit_code;
        } else {
            result = hbs::run_selftest(cfg);
        }
        if (write_or_print(result.primary, out_path) != 0) return hbs::kExitUsage;
        if (!result.summary.empty()) std::cerr << result.summary;
        return result.exit_code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return hbs::kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return hbs::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return hbs::kExitFailure;
    }
}
