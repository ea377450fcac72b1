#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hbs/borel.hpp"
#include "hbs/oracle.hpp"
#include "hbs/quantum.hpp"

namespace hbs {

enum class SolveBackend : std::uint8_t { ExactSampler, BruteSampler };

struct SolverConfig {
    std::uint64_t seed = 1;
    std::uint64_t max_rounds = 0;  // 0: per-level default from the round budget rule
    SolveBackend backend = SolveBackend::ExactSampler;
};

struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveReport {
    Flag flag;
    std::vector<std::uint64_t> rounds_per_level;
    std::vector<std::uint64_t> verify_attempts_per_level;
    std::uint64_t oracle_queries = 0;
    std::uint64_t prep_failures = 0;
    std::uint64_t verify_failures = 0;
    std::uint64_t check_queries = 0;
    double wall_seconds = 0.0;  // informational; excluded from serialized reports

    std::uint64_t rounds_total() const {
        std::uint64_t t = 0;
        for (auto r : rounds_per_level) t += r;
        return t;
    }

    // Every round pays one preparation query; each verification attempt at
    // degree k pays k more; the final stabilizer check pays check_queries.
    std::uint64_t expected_queries(int top_degree) const {
        std::uint64_t t = check_queries;
        for (std::size_t lvl = 0; lvl < rounds_per_level.size(); ++lvl) {
            t += rounds_per_level[lvl];
            if (lvl < verify_attempts_per_level.size())
                t += verify_attempts_per_level[lvl] * static_cast<std::uint64_t>(top_degree - lvl);
        }
        return t;
    }
};

// Per-level round budget. The verified per-round success probability is at
// least prod(1-q^{-j}) ((q-1)/q)^{2k-1} / d^2, so 50 expected successes make
// budget exhaustion vanishingly unlikely (< 1e-6 per level).
inline std::uint64_t default_max_rounds(const FieldCtx& f, int k, std::uint32_t det_subgroup_index = 1) {
    const double q = static_cast<double>(f.q());
    const double base = std::pow(q / (q - 1.0), 2.0 * k);
    const double d = static_cast<double>(det_subgroup_index);
    return static_cast<std::uint64_t>(std::ceil(50.0 * d * d * base));
}

// Test-harness instrumentation for a single guess round.
struct GuessTrace {
    std::optional<PrepOutcome> prep;
    std::optional<MatFq> outcome;
    std::optional<VecFq> candidate;
};

// One round: prepare a coset state, measure after the QFT, and read a guess
// for the last flag member off the outcome. Returns the kernel generator of
// Y^T (leading coordinate normalized to 1) when Y has rank k-1, nothing
// otherwise. A wrong guess can come back from outcomes off the perp stratum;
// verify_guess catches those.
inline std::optional<VecFq> guess_round(const OracleView& o, Rng& rng, GuessTrace* trace = nullptr,
                                        SolveBackend backend = SolveBackend::ExactSampler) {
    PrepOutcome prep = prep_coset_state(o, rng);
    if (trace) trace->prep = prep;
    if (!prep.coset) return std::nullopt;
    const MatFq x_eff = o.simulation_conjugator();
    const std::uint32_t d = o.det_subgroup_index();
    MatFq y = [&] {
        if (backend == SolveBackend::BruteSampler)
            return sample_outcome_dense(OutcomeDistribution::brute_force(x_eff, prep.representative, d), rng);
        if (d > 1) {
            DiagonalLaw law(o.field(), o.degree(), d);
            return sample_outcome(x_eff, prep.representative, rng, &law);
        }
        return sample_outcome(x_eff, prep.representative, rng);
    }();
    if (trace) trace->outcome = y;
    if (mat_rank(y) != o.degree() - 1) return std::nullopt;
    const Subspace ker = kernel(transpose(y));
    VecFq u = ker.basis().front();
    if (trace) trace->candidate = u;
    return u;
}

// Correctness test for a guessed line span(u): conjugate the oracle by a
// completion Z of u and compare the labels of the identity and of the k-1
// unit lower transvections touching the last row. All equal iff span(u) is
// the last member of the hidden flag. Costs exactly k queries.
inline std::pair<bool, MatFq> verify_guess(const OracleView& o, const VecFq& u) {
    if (u.is_zero()) throw std::invalid_argument("guess vector must be nonzero");
    const FieldCtx& f = o.field();
    const int k = o.degree();
    MatFq z = complete_to_invertible(u);
    const OracleView probe = o.conjugated(z);
    const OracleLabel base = probe.query(identity_matrix(f, k));
    bool ok = true;
    for (int j = 0; j + 1 < k; ++j) {
        MatFq t = identity_matrix(f, k);
        t.at(k - 1, j) = f.one();
        if (!(probe.query(t) == base)) ok = false;  // no short-circuit: cost is exactly k queries
    }
    return {ok, std::move(z)};
}

namespace detail {

inline Flag solve_level(const OracleView& view, const SolverConfig& cfg, Rng& rng,
                        SolveReport& report, std::size_t depth) {
    const FieldCtx& f = view.field();
    const int k = view.degree();
    if (report.rounds_per_level.size() <= depth) {
        report.rounds_per_level.resize(depth + 1, 0);
        report.verify_attempts_per_level.resize(depth + 1, 0);
    }
    if (k <= 1) return Flag{k, {}};

    const std::uint64_t budget =
        cfg.max_rounds ? cfg.max_rounds : default_max_rounds(f, k, view.det_subgroup_index());
    for (std::uint64_t round = 0; round < budget; ++round) {
        ++report.rounds_per_level[depth];
        GuessTrace trace;
        std::optional<VecFq> u = guess_round(view, rng, &trace, cfg.backend);
        if (!trace.prep->coset) ++report.prep_failures;
        if (!u) continue;
        ++report.verify_attempts_per_level[depth];
        auto [ok, z] = verify_guess(view, *u);
        if (!ok) {
            ++report.verify_failures;
            continue;
        }
        Flag sub = solve_level(view.conjugated(z).restricted(), cfg, rng, report, depth + 1);
        return lift_flag(sub, z);
    }
    throw SolveError("round budget exhausted at degree " + std::to_string(k));
}

inline SolveReport solve_common(HidingOracle& oracle, const SolverConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t count0 = oracle.query_count();
    const FieldCtx& f = oracle.field();
    const int n = oracle.degree();

    SolveReport report;
    Rng rng(cfg.seed);
    OracleView view(oracle);
    report.flag = detail::solve_level(view, cfg, rng, report, 0);

    // Accept only flags whose stabilizer generators are indistinguishable
    // from the identity under the original oracle.
    const std::vector<MatFq> gens =
        oracle.mode() == OracleMode::GL
            ? stabilizer_generators(report.flag, f)
            : stabilizer_generators_det_power(report.flag, f, static_cast<std::uint32_t>(n));
    const OracleLabel base = oracle.query(identity_matrix(f, n));
    report.check_queries = 1 + gens.size();
    for (const MatFq& g : gens)
        if (!(oracle.query(g) == base)) throw SolveError("recovered flag failed the stabilizer check");

    report.oracle_queries = oracle.query_count() - count0;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace detail

inline SolveReport solve_gl(HidingOracle& oracle, const SolverConfig& cfg) {
    if (oracle.mode() != OracleMode::GL) throw std::invalid_argument("oracle is not in GL mode");
    return detail::solve_common(oracle, cfg);
}

inline SolveReport solve_sl(HidingOracle& oracle, const SolverConfig& cfg) {
    if (oracle.mode() != OracleMode::SL) throw std::invalid_argument("oracle is not in SL mode");
    return detail::solve_common(oracle, cfg);
}

}  // namespace hbs
