#pragma once

#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hbs/io.hpp"
#include "hbs/selftest.hpp"
#include "hbs/solver.hpp"

namespace hbs {

// Exit codes shared by every subcommand.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct RunConfig {
    std::uint32_t p = 3;
    std::uint32_t r = 1;
    int n = 2;
    OracleMode mode = OracleMode::GL;
    std::uint64_t seed = 1;
    std::uint64_t trials = 1;
    std::uint64_t max_rounds = 0;
    SolveBackend backend = SolveBackend::ExactSampler;
    std::string format = "json";            // solve output: json | csv
    std::vector<int> sweep_n = {2, 3};      // sweep grid
    std::vector<std::uint32_t> sweep_q = {2, 3, 4, 5};
};

struct CommandResult {
    int exit_code = kExitOk;
    std::string primary;  // report / CSV body
    std::string summary;  // human-readable aggregate
};

// q -> (p, r) with q = p^r, p prime; throws on anything else.
inline std::pair<std::uint32_t, std::uint32_t> parse_prime_power(std::uint32_t q) {
    if (q < 2) throw std::invalid_argument("field order must be at least 2");
    std::uint32_t p = 2;
    while (q % p != 0) {
        ++p;
        if (static_cast<std::uint64_t>(p) * p > q) { p = q; break; }
    }
    std::uint32_t m = q, r = 0;
    while (m % p == 0) { m /= p; ++r; }
    if (m != 1) throw std::invalid_argument(std::to_string(q) + " is not a prime power");
    return {p, r};
}

namespace cli_detail {

struct InstanceRow {
    InstanceMeta meta;
    bool success;
    std::uint64_t rounds_total = 0, top_rounds = 0, queries = 0, prep_failures = 0;
    nlohmann::json json;
};

// Solve `trials` fresh instances with split RNG streams; instance i uses
// child stream 2i for generation and 2i+1 for the solver.
inline std::vector<InstanceRow> solve_batch(const FieldCtx& f, int n, OracleMode mode,
                                            std::uint64_t seed, std::uint64_t trials,
                                            std::uint64_t max_rounds, SolveBackend backend) {
    std::vector<InstanceRow> rows;
    Rng master(seed);
    for (std::uint64_t i = 0; i < trials; ++i) {
        Rng inst_rng = master.child(2 * i);
        auto inst = make_instance(n, f, inst_rng, mode);
        SolverConfig cfg;
        cfg.seed = master.child(2 * i + 1).seed();
        cfg.max_rounds = max_rounds;
        cfg.backend = backend;
        InstanceMeta meta{n, f.p(), f.r(), mode, cfg.seed};
        try {
            const SolveReport rep = mode == OracleMode::GL ? solve_gl(inst.oracle, cfg)
                                                           : solve_sl(inst.oracle, cfg);
            InstanceRow row{meta, true, rep.rounds_total(), rep.rounds_per_level.at(0),
                            rep.oracle_queries, rep.prep_failures, report_to_json(rep, meta)};
            rows.push_back(std::move(row));
        } catch (const SolveError& e) {
            rows.push_back(InstanceRow{meta, false, 0, 0, 0, 0, failure_to_json(e.what(), meta)});
        }
    }
    return rows;
}

inline std::string instance_csv(const std::vector<InstanceRow>& rows) {
    std::ostringstream os;
    os << "n,p,r,mode,seed,rounds_total,queries,prep_failures,success\n";
    for (const InstanceRow& row : rows)
        os << row.meta.n << ',' << row.meta.p << ',' << row.meta.r << ',' << mode_name(row.meta.mode)
           << ',' << row.meta.seed << ',' << row.rounds_total << ',' << row.queries << ','
           << row.prep_failures << ',' << (row.success ? 1 : 0) << '\n';
    return os.str();
}

struct BatchStats {
    std::uint64_t successes = 0;
    double success_rate = 0.0, mean_rounds = 0.0, mean_top_rounds = 0.0, mean_queries = 0.0;
};

inline BatchStats batch_stats(const std::vector<InstanceRow>& rows) {
    BatchStats s;
    if (rows.empty()) return s;
    double rounds = 0, top = 0, queries = 0;
    for (const InstanceRow& row : rows) {
        s.successes += row.success ? 1 : 0;
        rounds += static_cast<double>(row.rounds_total);
        top += static_cast<double>(row.top_rounds);
        queries += static_cast<double>(row.queries);
    }
    const double n = static_cast<double>(rows.size());
    s.success_rate = static_cast<double>(s.successes) / n;
    s.mean_rounds = rounds / n;
    s.mean_top_rounds = top / n;
    s.mean_queries = queries / n;
    return s;
}

}  // namespace cli_detail

inline CommandResult run_solve(const RunConfig& cfg) {
    const FieldCtx f(cfg.p, cfg.r);
    const auto rows = cli_detail::solve_batch(f, cfg.n, cfg.mode, cfg.seed, cfg.trials,
                                              cfg.max_rounds, cfg.backend);
    const auto stats = cli_detail::batch_stats(rows);

    CommandResult out;
    if (cfg.format == "csv") {
        out.primary = cli_detail::instance_csv(rows);
    } else {
        nlohmann::json doc;
        doc["config"] = {{"command", "solve"}, {"p", cfg.p},     {"r", cfg.r},
                         {"n", cfg.n},         {"mode", mode_name(cfg.mode)},
                         {"seed", cfg.seed},   {"trials", cfg.trials}};
        doc["instances"] = nlohmann::json::array();
        for (const auto& row : rows) doc["instances"].push_back(row.json);
        doc["summary"] = {{"success_rate", stats.success_rate},
                          {"mean_rounds", stats.mean_rounds},
                          {"mean_queries", stats.mean_queries}};
        out.primary = doc.dump(2) + "\n";
    }
    std::ostringstream sum;
    sum << "solved " << stats.successes << "/" << rows.size() << " instances, success_rate "
        << format_double(stats.success_rate) << ", mean_rounds " << format_double(stats.mean_rounds)
        << ", mean_queries " << format_double(stats.mean_queries) << "\n";
    out.summary = sum.str();
    out.exit_code = stats.successes == rows.size() ? kExitOk : kExitFailure;
    return out;
}

// Exact outcome law as CSV: one row per outcome Y (row-major codes joined by
// ':'), probability as an exact fraction; footer rows carry the perp-stratum
// and success-event masses.
inline CommandResult run_exact_dist(const RunConfig& cfg) {
    const FieldCtx f(cfg.p, cfg.r);
    Rng rng(cfg.seed);
    const MatFq x = random_invertible(f, cfg.n, rng);
    const MatFq b = random_invertible(f, cfg.n, rng);
    const auto dist = OutcomeDistribution::exact(x, b);
    const std::uint64_t outcomes = dist.outcome_count();  // throws over the cap

    std::ostringstream os;
    os << "y,prob_num,prob_den\n";
    Rational total(0);
    for (std::uint64_t i = 0; i < outcomes; ++i) {
        const MatFq y = dist.outcome(i);
        const Rational p = dist.prob_rational(y);
        total += p;
        os << matrix_key(y) << ',' << rational_to_string(p) << '\n';
    }
    os << "perp_mass," << rational_to_string(dist.perp_mass()) << '\n';
    os << "success_mass," << rational_to_string(dist.success_mass()) << '\n';

    CommandResult out;
    out.primary = os.str();
    std::ostringstream sum;
    sum << outcomes << " outcomes, total mass " << rational_to_string(total) << ", perp "
        << rational_to_string(dist.perp_mass()) << ", success "
        << rational_to_string(dist.success_mass()) << "\n";
    out.summary = sum.str();
    out.exit_code = total == Rational(1) ? kExitOk : kExitFailure;
    return out;
}

// Grid sweep: per-instance rows plus one aggregate row per (n, q, mode) cell
// comparing measured mean top-level rounds against the law's prediction.
inline CommandResult run_sweep(const RunConfig& cfg) {
    std::ostringstream agg;
    agg << "n,p,r,mode,trials,successes,success_rate,mean_rounds,predicted_rounds,ratio\n";
    std::string instances;
    bool all_ok = true;
    std::uint64_t cell = 0;
    for (int n : cfg.sweep_n)
        for (std::uint32_t q : cfg.sweep_q) {
            const auto [p, r] = parse_prime_power(q);
            const FieldCtx f(p, r);
            const std::uint64_t cell_seed = Rng(cfg.seed).child(cell++).seed();
            const auto rows = cli_detail::solve_batch(f, n, cfg.mode, cell_seed, cfg.trials,
                                                      cfg.max_rounds, cfg.backend);
            const auto stats = cli_detail::batch_stats(rows);
            std::string body = cli_detail::instance_csv(rows);
            if (!instances.empty()) body = body.substr(body.find('\n') + 1);  // keep one header
            instances += body;
            const std::uint32_t d =
                cfg.mode == OracleMode::SL ? std::gcd<std::uint32_t>(n, f.q() - 1) : 1;
            const double predicted = 1.0 / verified_round_success_probability(f, n, d);
            agg << n << ',' << p << ',' << r << ',' << mode_name(cfg.mode) << ',' << rows.size() << ','
                << stats.successes << ',' << format_double(stats.success_rate) << ','
                << format_double(stats.mean_top_rounds) << ',' << format_double(predicted) << ','
                << format_double(stats.mean_top_rounds / predicted) << '\n';
            all_ok = all_ok && stats.successes == rows.size();
        }
    CommandResult out;
    out.primary = instances;
    out.summary = agg.str();
    out.exit_code = all_ok ? kExitOk : kExitFailure;
    return out;
}

inline CommandResult run_selftest(const RunConfig&) {
    std::vector<CheckResult> checks = run_acceptance_criteria();
    const std::vector<CheckResult> extra = run_invariant_checks();
    checks.insert(checks.end(), extra.begin(), extra.end());
    CommandResult out;
    out.primary = format_check_table(checks);
    bool ok = true;
    for (const CheckResult& c : checks) ok = ok && c.pass;
    out.summary = ok ? "all checks passed\n" : "some checks FAILED\n";
    out.exit_code = ok ? kExitOk : kExitFailure;
    return out;
}

}  // namespace hbs
