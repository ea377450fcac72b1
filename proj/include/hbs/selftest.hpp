#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hbs/io.hpp"
#include "hbs/quantum.hpp"
#include "hbs/solver.hpp"

namespace hbs {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

namespace selftest_detail {

inline CheckResult timed(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    r.name = name;
    try {
        auto [pass, detail] = fn();
        r.pass = pass;
        r.detail = detail;
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

struct Grid {
    int n;
    std::uint32_t p, r;
};

inline std::vector<MatFq> enumerate_invertible(const FieldCtx& f, int n) {
    std::vector<MatFq> out;
    const std::uint64_t total = matrix_space_size(f, n, n);
    for (std::uint64_t i = 0; i < total; ++i) {
        MatFq m = matrix_from_index(f, n, n, i);
        if (mat_rank(m) == n) out.push_back(std::move(m));
    }
    return out;
}

// Three-sigma band for a Bernoulli rate estimated from N draws.
inline bool within_3sigma(double rate, double expected, std::uint64_t n_draws, std::string& note) {
    const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n_draws));
    std::ostringstream os;
    os << "rate " << rate << " expected " << expected << " band " << 3.0 * sigma;
    note = os.str();
    return std::abs(rate - expected) <= 3.0 * sigma;
}

// --- criterion 1: closed form equals the definitional character-sum law ---
inline CheckResult criterion_closed_form() {
    return timed("closed-form certification (exact vs character sums)", [] {
        const std::vector<Grid> grid = {{1, 2, 1}, {1, 3, 1}, {2, 2, 1}, {2, 3, 1}, {3, 2, 1}};
        double worst = 0.0;
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const FieldCtx f(grid[g].p, grid[g].r);
            Rng rng(0x11c1 + g);
            for (int rep = 0; rep < 5; ++rep) {
                const MatFq x = random_invertible(f, grid[g].n, rng);
                const MatFq b = random_invertible(f, grid[g].n, rng);
                const auto exact = OutcomeDistribution::exact(x, b);
                const auto brute = OutcomeDistribution::brute_force(x, b);
                for (std::uint64_t i = 0; i < exact.outcome_count(); ++i) {
                    const MatFq y = exact.outcome(i);
                    worst = std::max(worst, std::abs(exact.prob(y) - brute.prob(y)));
                }
            }
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream os;
        os << "max pointwise gap " << worst << ", " << elapsed << " s";
        return std::pair{worst <= 1e-9 && elapsed < 60.0, os.str()};
    });
}

// --- criterion 2: perp and success masses in exact rational arithmetic ---
inline CheckResult criterion_stratum_masses() {
    return timed("perp / success stratum masses (rational)", [] {
        const std::vector<Grid> grid = {{1, 2, 1}, {1, 3, 1}, {2, 2, 1}, {2, 3, 1}, {3, 2, 1}};
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const FieldCtx f(grid[g].p, grid[g].r);
            const int n = grid[g].n;
            Rng rng(0x22c2 + g);
            const MatFq x = random_invertible(f, n, rng);
            const MatFq b = random_invertible(f, n, rng);
            const auto exact = OutcomeDistribution::exact(x, b);
            const long long q = f.q();
            const Rational perp_expected(checked_pow_ll(q - 1, n), checked_pow_ll(q, n));
            const Rational succ_expected(checked_pow_ll(q - 1, 2 * n - 1), checked_pow_ll(q, 2 * n - 1));
            if (exact.perp_mass() != perp_expected) return std::pair{false, std::string("perp mass mismatch")};
            if (exact.success_mass() != succ_expected) return std::pair{false, std::string("success mass mismatch")};
            if (exact.total_mass_rational() != Rational(1)) return std::pair{false, std::string("total mass != 1")};
        }
        return std::pair{true, std::string("((q-1)/q)^n and ((q-1)/q)^(2n-1) on the whole grid")};
    });
}

// --- criterion 3: rank of strictly upper triangular matrices ---
inline CheckResult criterion_rank_fraction() {
    return timed("rank n-1 fraction over strictly upper triangular", [] {
        for (std::uint32_t q : {2u, 3u, 4u})
            for (int n = 1; n <= 4; ++n) {
                const FieldCtx f(q == 4 ? 2 : q, q == 4 ? 2 : 1);
                const int slots = n * (n - 1) / 2;
                std::uint64_t total = 1;
                for (int i = 0; i < slots; ++i) total *= f.q();
                std::uint64_t hits = 0;
                for (std::uint64_t idx = 0; idx < total; ++idx) {
                    MatFq z(f, n, n);
                    std::uint64_t c = idx;
                    for (int i = 0; i < n; ++i)
                        for (int j = i + 1; j < n; ++j) { z.at(i, j) = f.element(c % f.q()); c /= f.q(); }
                    bool super_nonzero = true;
                    for (int i = 0; i + 1 < n; ++i)
                        if (f.is_zero(z.at(i, i + 1))) super_nonzero = false;
                    const bool rank_hit = (n == 1) || (mat_rank(z) == n - 1);
                    if (rank_hit != super_nonzero)
                        return std::pair{false, std::string("rank iff superdiagonal characterization failed")};
                    if (rank_hit) ++hits;
                }
                // hits / q^slots == ((q-1)/q)^(n-1), cross-multiplied exactly
                const unsigned __int128 lhs =
                    static_cast<unsigned __int128>(hits) * checked_pow_ll(f.q(), n - 1);
                const unsigned __int128 rhs =
                    static_cast<unsigned __int128>(total) * checked_pow_ll(f.q() - 1, n - 1);
                if (lhs != rhs) return std::pair{false, std::string("fraction mismatch")};
            }
        return std::pair{true, std::string("exact for n <= 4, q in {2,3,4}")};
    });
}

// --- criterion 4: coset preparation success rate ---
inline CheckResult criterion_prep_rate() {
    return timed("coset preparation success rate", [] {
        const std::uint64_t draws = 100000;
        std::ostringstream os;
        for (std::uint32_t q : {2u, 3u, 5u})
            for (int n : {2, 3}) {
                const FieldCtx f(q, 1);
                Rng rng(0x44c4 + q * 10 + n);
                auto inst = make_instance(n, f, rng, OracleMode::GL);
                OracleView view(inst.oracle);
                std::uint64_t hits = 0;
                for (std::uint64_t i = 0; i < draws; ++i)
                    if (prep_coset_state(view, rng).coset) ++hits;
                const double rate = static_cast<double>(hits) / draws;
                const double expected = boost::rational_cast<double>(prep_success_probability(f, n));
                std::string note;
                if (!within_3sigma(rate, expected, draws, note))
                    return std::pair{false, "n=" + std::to_string(n) + " q=" + std::to_string(q) + ": " + note};
                if (rate <= 0.25 || expected <= 0.25)
                    return std::pair{false, "rate at n=" + std::to_string(n) + " q=" + std::to_string(q) +
                                                " not above 1/4"};
                os << " (" << n << "," << q << ")=" << rate;
            }
        return std::pair{true, "all within 3 sigma and > 1/4:" + os.str()};
    });
}

// --- criterion 5: kernel of Y^T on the perp stratum ---
inline CheckResult criterion_kernel_theorem() {
    return timed("kernel theorem on rank n-1 perp outcomes", [] {
        // exhaustive at n=2
        for (std::uint32_t q : {2u, 3u}) {
            const FieldCtx f(q, 1);
            Rng rng(0x55c5 + q);
            auto inst = make_instance(2, f, rng, OracleMode::GL);
            const MatFq& x = inst.descriptor.conjugator.value();
            const MatFq b = random_invertible(f, 2, rng);
            const Subspace& hidden_line = inst.descriptor.flag.members.back();
            std::uint64_t checked = 0;
            for (std::uint64_t c = 0; c < f.q(); ++c) {
                MatFq m(f, 2, 2);
                m.at(1, 0) = f.element(c);
                const MatFq y = coset_y_of_m(x, b, m);
                if (mat_rank(y) != 1) continue;
                ++checked;
                if (!(kernel(transpose(y)) == hidden_line))
                    return std::pair{false, std::string("exhaustive exception at q=") + std::to_string(q)};
            }
            if (checked != f.q() - 1) return std::pair{false, std::string("unexpected perp stratum size")};
        }
        // sampled at n=3
        for (std::uint32_t q : {2u, 3u}) {
            const FieldCtx f(q, 1);
            Rng rng(0x55d5 + q);
            auto inst = make_instance(3, f, rng, OracleMode::GL);
            const MatFq& x = inst.descriptor.conjugator.value();
            const MatFq b = random_invertible(f, 3, rng);
            const Subspace perp = perp_of_coset(x, b);
            const Subspace& hidden_line = inst.descriptor.flag.members.back();
            std::uint64_t hits = 0;
            for (int i = 0; i < 10000; ++i) {
                const MatFq y = sample_outcome(x, b, rng);
                if (!subspace_contains_matrix(perp, y)) continue;
                if (mat_rank(y) != 2) continue;
                ++hits;
                if (!(kernel(transpose(y)) == hidden_line))
                    return std::pair{false, std::string("sampled exception at q=") + std::to_string(q)};
            }
            if (hits == 0) return std::pair{false, std::string("no rank n-1 perp outcomes sampled")};
        }
        return std::pair{true, std::string("zero exceptions, exhaustive n=2 and 10^4 samples n=3")};
    });
}

// --- criterion 6: hiding property, exhaustively ---
inline CheckResult criterion_hiding_property() {
    return timed("hiding property over all invertible pairs", [] {
        const std::vector<Grid> grid = {{2, 2, 1}, {2, 3, 1}, {3, 2, 1}};
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const FieldCtx f(grid[g].p, grid[g].r);
            const int n = grid[g].n;
            Rng rng(0x66c6 + g);
            auto inst = make_instance(n, f, rng, OracleMode::GL);
            const Flag& flag = inst.descriptor.flag;
            const std::vector<MatFq> gl = enumerate_invertible(f, n);
            std::vector<OracleLabel> labels;
            labels.reserve(gl.size());
            for (const MatFq& a : gl) labels.push_back(inst.oracle.query(a));
            for (std::size_t i = 0; i < gl.size(); ++i)
                for (std::size_t j = 0; j < gl.size(); ++j) {
                    const bool same_label = labels[i] == labels[j];
                    const bool same_coset = stabilizes(mat_mul(gl[i], inverse(gl[j])), flag);
                    if (same_label != same_coset)
                        return std::pair{false, "mismatch at n=" + std::to_string(n) +
                                                    " q=" + std::to_string(f.q())};
                }
        }
        return std::pair{true, std::string("label equality == coset equality on GL_2(F_2), GL_2(F_3), GL_3(F_2)")};
    });
}

// --- criterion 7: end-to-end GL ---
inline CheckResult criterion_end_to_end_gl() {
    return timed("end-to-end GL recovery and round counts", [] {
        const auto t0 = std::chrono::steady_clock::now();
        const int trials = 200;
        std::ostringstream os;
        for (int n : {2, 3})
            for (std::uint32_t q : {2u, 3u, 4u, 5u}) {
                const FieldCtx f(q == 4 ? 2 : q, q == 4 ? 2 : 1);
                Rng master(0x77c7 + q * 100 + n);
                std::uint64_t rounds_sum = 0;
                for (int t = 0; t < trials; ++t) {
                    Rng inst_rng = master.child(2 * t);
                    auto inst = make_instance(n, f, inst_rng, OracleMode::GL);
                    SolverConfig cfg;
                    cfg.seed = master.child(2 * t + 1).seed();
                    const SolveReport rep = solve_gl(inst.oracle, cfg);
                    if (!(rep.flag == inst.descriptor.flag))
                        return std::pair{false, "wrong flag at n=" + std::to_string(n) +
                                                    " q=" + std::to_string(f.q())};
                    rounds_sum += rep.rounds_per_level.at(0);
                }
                const double p = verified_round_success_probability(f, n);
                const double mean = static_cast<double>(rounds_sum) / trials;
                const double expected = 1.0 / p;
                const double sigma = std::sqrt(1.0 - p) / p / std::sqrt(static_cast<double>(trials));
                if (std::abs(mean - expected) > 3.0 * sigma) {
                    std::ostringstream err;
                    err << "rounds off at n=" << n << " q=" << f.q() << ": mean " << mean
                        << " expected " << expected << " band " << 3.0 * sigma;
                    return std::pair{false, err.str()};
                }
                os << " (" << n << "," << f.q() << ")=" << mean;
            }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::pair{elapsed < 180.0,
                         "100% recovery, mean top rounds:" + os.str() + ", " + format_double(elapsed) + " s"};
    });
}

// --- criterion 8: end-to-end SL and root independence ---
inline CheckResult criterion_end_to_end_sl() {
    return timed("end-to-end SL recovery and root independence", [] {
        const int trials = 100;
        for (int n : {2, 3})
            for (std::uint32_t q : {3u, 5u}) {
                const FieldCtx f(q, 1);
                Rng master(0x88c8 + q * 100 + n);
                for (int t = 0; t < trials; ++t) {
                    Rng inst_rng = master.child(2 * t);
                    auto inst = make_instance(n, f, inst_rng, OracleMode::SL);
                    SolverConfig cfg;
                    cfg.seed = master.child(2 * t + 1).seed();
                    const SolveReport rep = solve_sl(inst.oracle, cfg);
                    if (!(rep.flag == inst.descriptor.flag))
                        return std::pair{false, "wrong flag at n=" + std::to_string(n) +
                                                    " q=" + std::to_string(q)};
                }
            }
        // root independence of the extended oracle, n=2 q=5
        {
            const FieldCtx f(5, 1);
            const int n = 2;
            Rng rng(0x88d8);
            const MatFq x = random_invertible(f, n, rng);
            const HidingOracle probe(f, x, OracleMode::SL);
            int tested = 0;
            for (int t = 0; t < 5000 && tested < 1000; ++t) {
                const MatFq a = random_invertible(f, n, rng);
                if (probe.det_class(det(a)) != 0) continue;
                ++tested;
                std::vector<MatFq> canon;
                for (FqElem z : f.all_units())
                    if (f.pow(z, n) == det(a))
                        canon.push_back(lower_canonical_form(mat_mul(x, scalar_mul(f.inv(z), a))));
                if (canon.size() < 2) return std::pair{false, std::string("expected multiple roots")};
                for (const MatFq& c : canon)
                    if (!(c == canon.front()))
                        return std::pair{false, std::string("labels depend on the chosen root")};
            }
            if (tested < 1000) return std::pair{false, std::string("not enough in-domain samples")};
        }
        return std::pair{true, std::string("100% recovery on the SL grid; 10^3 root-independence checks")};
    });
}

// --- criterion 9: QFT unitarity and subspace measurement support ---
inline CheckResult criterion_qft_and_subspace() {
    return timed("QFT unitarity and W-perp amplitude support", [] {
        double worst = 0.0;
        for (std::uint32_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u}) {
            std::uint32_t p = q, r = 1;
            if (q == 4) { p = 2; r = 2; }
            if (q == 8) { p = 2; r = 3; }
            if (q == 9) { p = 3; r = 2; }
            const FieldCtx f(p, r);
            const QftSpec spec = qft_matrix(f);
            for (std::uint32_t i = 0; i < q; ++i)
                for (std::uint32_t j = 0; j < q; ++j) {
                    std::complex<double> dot = 0.0;
                    for (std::uint32_t k = 0; k < q; ++k) dot += spec.u[i][k] * std::conj(spec.u[j][k]);
                    worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
                }
        }
        if (worst >= 1e-12) return std::pair{false, "unitarity defect " + format_double(worst)};

        // amplitude path: all mass on W-perp, uniform there
        for (auto [p, r, m_max] : std::vector<std::tuple<std::uint32_t, std::uint32_t, int>>{{2, 1, 9}, {3, 1, 4}}) {
            const FieldCtx f(p, r);
            Rng rng(0x99c9 + p);
            for (int m = 2; m <= m_max; m += 2) {
                const MatFq a = random_matrix(f, std::max(1, m / 2), m, rng);
                const Subspace w = kernel(a);
                const VecFq v0 = random_vector(f, m, rng);
                const Subspace perp = subspace_perp(f, w);
                const std::vector<double> probs = subspace_hsp_amplitudes(w, v0);
                double off_mass = 0.0, on_min = 1.0, on_max = 0.0, total = 0.0;
                for (std::uint64_t code = 0; code < probs.size(); ++code) {
                    VecFq y(f, m);
                    std::uint64_t c = code;
                    for (int i = 0; i < m; ++i) { y.at(i) = f.element(c % f.q()); c /= f.q(); }
                    total += probs[code];
                    if (perp.contains(y)) {
                        on_min = std::min(on_min, probs[code]);
                        on_max = std::max(on_max, probs[code]);
                    } else {
                        off_mass += probs[code];
                    }
                }
                if (off_mass >= 1e-12) return std::pair{false, std::string("mass off W-perp")};
                if (std::abs(total - 1.0) >= 1e-9) return std::pair{false, std::string("amplitudes not normalized")};
                if (on_max - on_min >= 1e-9) return std::pair{false, std::string("not uniform on W-perp")};
            }
        }
        return std::pair{true, "unitarity defect " + format_double(worst) + "; zero off-perp mass"};
    });
}

// --- criterion 10: sampler total-variation distance ---
inline CheckResult criterion_sampler_tv() {
    return timed("sampler total-variation distance", [] {
        const FieldCtx f(3, 1);
        Rng rng(0xaaca);
        const MatFq x = random_invertible(f, 2, rng);
        const MatFq b = random_invertible(f, 2, rng);
        const auto exact = OutcomeDistribution::exact(x, b);
        const std::uint64_t outcomes = exact.outcome_count();
        std::vector<std::uint64_t> counts(outcomes, 0);
        const std::uint64_t draws = 100000;
        for (std::uint64_t i = 0; i < draws; ++i) {
            const MatFq y = sample_outcome(x, b, rng);
            std::uint64_t code = 0, mul = 1;
            for (int a2 = 0; a2 < 2; ++a2)
                for (int b2 = 0; b2 < 2; ++b2) { code += y.at(a2, b2).v * mul; mul *= f.q(); }
            ++counts[code];
        }
        double tv = 0.0;
        for (std::uint64_t i = 0; i < outcomes; ++i)
            tv += std::abs(static_cast<double>(counts[i]) / draws - exact.prob(exact.outcome(i)));
        tv /= 2.0;
        return std::pair{tv < 0.01, "TV distance " + format_double(tv) + " at 10^5 samples (n=2, q=3)"};
    });
}

// --- criterion 11: determinism (runtime bound is added by the runner) ---
inline CheckResult criterion_determinism() {
    return timed("determinism of reports under a fixed seed", [] {
        auto run_once = [](std::uint64_t seed) {
            const FieldCtx f(3, 1);
            Rng master(seed);
            Rng inst_rng = master.child(0);
            auto inst = make_instance(3, f, inst_rng, OracleMode::GL);
            SolverConfig cfg;
            cfg.seed = master.child(1).seed();
            const SolveReport rep = solve_gl(inst.oracle, cfg);
            return report_to_json(rep, InstanceMeta{3, 3, 1, OracleMode::GL, seed}).dump();
        };
        if (run_once(12345) != run_once(12345))
            return std::pair{false, std::string("same seed produced different reports")};
        if (run_once(12345) == run_once(54321))
            return std::pair{false, std::string("different seeds produced identical reports")};
        return std::pair{true, std::string("byte-identical reports for equal seeds")};
    });
}

}  // namespace selftest_detail

// The acceptance criteria, in order. The final check also enforces the
// whole-suite runtime bound.
inline std::vector<CheckResult> run_acceptance_criteria() {
    using namespace selftest_detail;
    std::vector<CheckResult> out;
    out.push_back(criterion_closed_form());
    out.push_back(criterion_stratum_masses());
    out.push_back(criterion_rank_fraction());
    out.push_back(criterion_prep_rate());
    out.push_back(criterion_kernel_theorem());
    out.push_back(criterion_hiding_property());
    out.push_back(criterion_end_to_end_gl());
    out.push_back(criterion_end_to_end_sl());
    out.push_back(criterion_qft_and_subspace());
    out.push_back(criterion_sampler_tv());

    CheckResult det = criterion_determinism();
    double total = det.seconds;
    for (const CheckResult& c : out) total += c.seconds;
    if (total >= 300.0) {
        det.pass = false;
        det.detail += "; suite runtime " + format_double(total) + " s exceeds 300 s";
    } else {
        det.detail += "; suite runtime " + format_double(total) + " s";
    }
    out.push_back(det);
    return out;
}

// Cheaper module-level invariants for the selftest command.
inline std::vector<CheckResult> run_invariant_checks() {
    using namespace selftest_detail;
    std::vector<CheckResult> out;

    out.push_back(timed("field axioms (exhaustive small fields)", [] {
        for (auto [p, r] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
                 {2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}, {13, 1}, {2, 4}}) {
            const FieldCtx f(p, r);
            const auto elems = f.all_elements();
            for (FqElem a : elems)
                for (FqElem b : elems) {
                    if (!(f.add(a, b) == f.add(b, a))) return std::pair{false, std::string("+ not commutative")};
                    if (!(f.mul(a, b) == f.mul(b, a))) return std::pair{false, std::string("* not commutative")};
                    for (FqElem c : elems) {
                        if (!(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))))
                            return std::pair{false, std::string("distributivity failed")};
                        if (!(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))))
                            return std::pair{false, std::string("* not associative")};
                    }
                }
            for (FqElem a : f.all_units()) {
                if (!(f.mul(a, f.inv(a)) == f.one())) return std::pair{false, std::string("inverse failed")};
                if (!(f.pow(a, f.q() - 1) == f.one())) return std::pair{false, std::string("unit order failed")};
            }
        }
        return std::pair{true, std::string("q in {2,3,4,5,7,8,9,13,16}")};
    }));

    out.push_back(timed("character orthogonality", [] {
        for (auto [p, r] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
                 {2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}, {11, 1}, {13, 1}, {2, 4}}) {
            const FieldCtx f(p, r);
            for (FqElem m : f.all_elements()) {
                std::complex<double> sum = 0.0;
                for (FqElem a : f.all_elements()) sum += f.character(a, m);
                const double expected = f.is_zero(m) ? static_cast<double>(f.q()) : 0.0;
                if (std::abs(sum - expected) > 1e-9)
                    return std::pair{false, "orthogonality failed at q=" + std::to_string(f.q())};
            }
        }
        return std::pair{true, std::string("sum_a omega^{Tr(am)} = q [m=0], q <= 16")};
    }));

    out.push_back(timed("canonical form is an orbit invariant", [] {
        const FieldCtx f(3, 1);
        Rng rng(0xbbcb);
        for (int t = 0; t < 10000; ++t) {
            const MatFq m = random_matrix(f, 3, 3, rng);
            const MatFq c = lower_canonical_form(m);
            if (!(lower_canonical_form(c) == c)) return std::pair{false, std::string("not idempotent")};
            // random invertible lower triangular action
            MatFq l(f, 3, 3);
            for (int i = 0; i < 3; ++i) {
                l.at(i, i) = f.random_unit(rng);
                for (int j = 0; j < i; ++j) l.at(i, j) = f.random(rng);
            }
            if (!(lower_canonical_form(mat_mul(l, m)) == c))
                return std::pair{false, std::string("not constant on the orbit")};
        }
        return std::pair{true, std::string("idempotent and orbit-constant on 10^4 random cases")};
    }));

    out.push_back(timed("stabilizer size and generator closure", [] {
        for (std::uint32_t q : {2u, 3u}) {
            const FieldCtx f(q, 1);
            Rng rng(0xcccc + q);
            const MatFq x = random_invertible(f, 2, rng);
            const Flag flag = flag_from_conjugator(x);
            const auto borel = enumerate_borel(flag, f);
            const std::uint64_t expected = (q - 1) * (q - 1) * q;
            if (borel.size() != expected) return std::pair{false, std::string("stabilizer size mismatch")};
            std::uint64_t counted = 0;
            for (const MatFq& a : enumerate_invertible(f, 2))
                if (stabilizes(a, flag)) ++counted;
            if (counted != expected) return std::pair{false, std::string("stabilizes() count mismatch")};
            // closure of the generating set
            std::vector<MatFq> closure = {identity_matrix(f, 2)};
            const auto gens = stabilizer_generators(flag, f);
            bool grew = true;
            while (grew) {
                grew = false;
                for (std::size_t i = 0; i < closure.size(); ++i)
                    for (const MatFq& g : gens) {
                        const MatFq prod = mat_mul(closure[i], g);
                        bool seen = false;
                        for (const MatFq& h : closure)
                            if (h == prod) { seen = true; break; }
                        if (!seen) { closure.push_back(prod); grew = true; }
                    }
            }
            if (closure.size() != expected) return std::pair{false, std::string("generator closure mismatch")};
        }
        return std::pair{true, std::string("|B| = (q-1)^n q^{n(n-1)/2} and generators close, n=2, q in {2,3}")};
    }));

    out.push_back(timed("query accounting matches the oracle counter", [] {
        for (int t = 0; t < 50; ++t) {
            const FieldCtx f(3, 1);
            Rng rng = Rng(0xddcd).child(t);
            auto inst = make_instance(3, f, rng, OracleMode::GL);
            SolverConfig cfg;
            cfg.seed = 99 + t;
            const SolveReport rep = solve_gl(inst.oracle, cfg);
            if (rep.oracle_queries != inst.oracle.query_count())
                return std::pair{false, std::string("reported queries differ from the counter")};
            if (rep.oracle_queries != rep.expected_queries(3))
                return std::pair{false, std::string("counter differs from rounds + verifications + check")};
        }
        return std::pair{true, std::string("counter equals rounds + k-per-verification + final check, 50 solves")};
    }));

    out.push_back(timed("subspace canonical form is basis independent", [] {
        const FieldCtx f(3, 1);
        Rng rng(0xeece);
        for (int t = 0; t < 200; ++t) {
            const MatFq a = random_matrix(f, 2, 4, rng);
            const Subspace s = kernel(a);
            if (s.dim() == 0) continue;
            // remix the basis through a random invertible coefficient matrix
            const MatFq c = random_invertible(f, s.dim(), rng);
            std::vector<VecFq> remixed;
            for (int i = 0; i < s.dim(); ++i) {
                VecFq v(f, 4);
                for (int j = 0; j < s.dim(); ++j)
                    for (int t2 = 0; t2 < 4; ++t2)
                        v.at(t2) = f.add(v.at(t2), f.mul(c.at(i, j), s.basis()[j].at(t2)));
                remixed.push_back(v);
            }
            if (!(Subspace::span(f, 4, remixed) == s))
                return std::pair{false, std::string("canonical form changed under remixing")};
        }
        return std::pair{true, std::string("stable under 200 random basis remixes")};
    }));

    return out;
}

inline std::string format_check_table(const std::vector<CheckResult>& checks) {
    std::ostringstream os;
    for (const CheckResult& c : checks) {
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
        if (!c.detail.empty()) os << " -- " << c.detail;
        os << " (" << format_double(c.seconds) << " s)\n";
    }
    return os.str();
}

}  // namespace hbs
