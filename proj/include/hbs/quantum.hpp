#pragma once

#include <boost/rational.hpp>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hbs/linalg.hpp"
#include "hbs/oracle.hpp"

namespace hbs {

using Rational = boost::rational<long long>;

inline long long checked_pow_ll(std::uint64_t base, std::uint32_t exp) {
    unsigned __int128 acc = 1;
    for (std::uint32_t i = 0; i < exp; ++i) {
        acc *= base;
        if (acc > static_cast<unsigned __int128>(INT64_MAX))
            throw std::domain_error("rational probability out of 64-bit range");
    }
    return static_cast<long long>(acc);
}

inline long long checked_mul_ll(long long a, long long b) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
    if (p > static_cast<unsigned __int128>(INT64_MAX))
        throw std::domain_error("rational probability out of 64-bit range");
    return static_cast<long long>(p);
}

// ---------------------------------------------------------------------------
// QFT of F_q as a dense unitary: entry (x, y) = omega^{Tr(xy)} / sqrt(q).

struct QftSpec {
    const FieldCtx* field;
    std::vector<std::vector<std::complex<double>>> u;
};

inline QftSpec qft_matrix(const FieldCtx& f) {
    constexpr std::uint32_t kQftCap = 4096;
    if (f.q() > kQftCap) throw std::domain_error("QFT dense matrix cap exceeded");
    const std::uint32_t q = f.q();
    const double scale = 1.0 / std::sqrt(static_cast<double>(q));
    QftSpec spec{&f, {}};
    spec.u.assign(q, std::vector<std::complex<double>>(q));
    for (std::uint32_t x = 0; x < q; ++x)
        for (std::uint32_t y = 0; y < q; ++y)
            spec.u[x][y] = scale * f.character(f.element(x), f.element(y));
    return spec;
}

// ---------------------------------------------------------------------------
// Measurement after the QFT of a subspace coset state |W + v0>: the outcome
// is a uniformly random element of W-perp; the offset only contributes a
// phase. The sampling path draws directly from a basis of W-perp; the
// amplitude path evaluates the definitional character sums and is meant for
// exhaustive verification at small sizes.

inline VecFq subspace_hsp_measure(const Subspace& w, const VecFq& v0, Rng& rng) {
    const FieldCtx& f = v0.field();
    const Subspace perp = subspace_perp(f, w);
    VecFq out(f, v0.size());
    for (const VecFq& b : perp.basis()) {
        const FqElem c = f.random(rng);
        for (int i = 0; i < out.size(); ++i) out.at(i) = f.add(out.at(i), f.mul(c, b.at(i)));
    }
    return out;
}

// |c_y|^2 for every y in F_q^m, indexed by the odometer code of y.
inline std::vector<double> subspace_hsp_amplitudes(const Subspace& w, const VecFq& v0) {
    const FieldCtx& f = v0.field();
    const int m = v0.size();
    std::uint64_t points = 1;
    for (int i = 0; i < m; ++i) {
        points *= f.q();
        if (points > (std::uint64_t(1) << 20)) throw std::domain_error("amplitude enumeration cap exceeded");
    }
    std::uint64_t w_size = 1;
    for (int i = 0; i < w.dim(); ++i) w_size *= f.q();
    if (points * w_size > (std::uint64_t(1) << 26))
        throw std::domain_error("amplitude enumeration cap exceeded");

    // enumerate W by coefficient combinations over its basis
    std::vector<VecFq> w_elems;
    w_elems.reserve(w_size);
    {
        for (std::uint64_t idx = 0; idx < w_size; ++idx) {
            std::uint64_t c = idx;
            VecFq v(f, m);
            for (int i = 0; i < w.dim(); ++i) {
                const FqElem ci = f.element(c % f.q());
                c /= f.q();
                for (int t = 0; t < m; ++t)
                    v.at(t) = f.add(v.at(t), f.mul(ci, w.basis()[i].at(t)));
            }
            w_elems.push_back(v);
        }
    }

    auto dot = [&](const VecFq& a, const VecFq& b) {
        FqElem acc = f.zero();
        for (int i = 0; i < m; ++i) acc = f.add(acc, f.mul(a.at(i), b.at(i)));
        return acc;
    };

    const double norm = 1.0 / (static_cast<double>(w_size) * static_cast<double>(points));
    std::vector<double> probs(points);
    for (std::uint64_t code = 0; code < points; ++code) {
        VecFq y(f, m);
        std::uint64_t c = code;
        for (int i = 0; i < m; ++i) { y.at(i) = f.element(c % f.q()); c /= f.q(); }
        std::complex<double> sum = 0.0;
        for (const VecFq& v : w_elems) sum += f.char_of_trace(dot(v, y));
        const std::complex<double> cy = f.char_of_trace(dot(v0, y)) * sum;
        probs[code] = std::norm(cy) * norm;
    }
    return probs;
}

// ---------------------------------------------------------------------------
// Coset state preparation: measuring f on the uniform superposition over all
// of Mat_{n x n} collapses to a uniformly chosen preimage class weighted by
// its size, which is exactly the distribution of drawing A uniformly and
// keeping its label. A coset outcome leaves the state |H A>; anything else
// is a wasted round.

struct PrepOutcome {
    bool coset = false;
    MatFq representative;
    OracleLabel label;
};

inline PrepOutcome prep_coset_state(const OracleView& o, Rng& rng) {
    const FieldCtx& f = o.field();
    MatFq a = random_matrix(f, o.degree(), o.degree(), rng);
    OracleLabel label = o.query(a);
    const bool coset = label.tag == LabelTag::Coset;
    return PrepOutcome{coset, std::move(a), std::move(label)};
}

// ---------------------------------------------------------------------------
// The measured matrix Y relates to M := X B Y^T X^{-1}; the outcome law lives
// on the M side. Y carries nonzero probability exactly when M is lower
// triangular, strict lower entries are uniform, and each diagonal entry is 0
// with probability (q-1)/q or any fixed nonzero value with probability
// 1/(q(q-1)).

inline MatFq coset_m_of_y(const MatFq& x, const MatFq& b, const MatFq& y) {
    return mat_mul(x, mat_mul(b, mat_mul(transpose(y), inverse(x))));
}

inline MatFq coset_y_of_m(const MatFq& x, const MatFq& b, const MatFq& m) {
    return transpose(mat_mul(inverse(b), mat_mul(inverse(x), mat_mul(m, x))));
}

// {Y : X B Y^T X^{-1} strictly lower triangular}, the dual of the lower
// triangular matrix space shifted through the coset map; as a subspace of
// F_q^{n^2} under row-major flattening. Dimension n(n-1)/2.
inline Subspace perp_of_coset(const MatFq& x, const MatFq& b) {
    const FieldCtx& f = x.field();
    const int n = x.rows();
    std::vector<VecFq> basis;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (!(i > j)) continue;  // strictly lower positions of M
            MatFq m(f, n, n);
            m.at(i, j) = f.one();
            const MatFq y = coset_y_of_m(x, b, m);
            VecFq v(f, n * n);
            for (int a2 = 0; a2 < n; ++a2)
                for (int b2 = 0; b2 < n; ++b2) v.at(a2 * n + b2) = y.at(a2, b2);
            basis.push_back(v);
        }
    return Subspace::span(f, n * n, basis);
}

inline bool subspace_contains_matrix(const Subspace& s, const MatFq& y) {
    const int n = y.rows();
    VecFq v(y.field(), n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v.at(i * n + j) = y.at(i, j);
    return s.contains(v);
}

// ---------------------------------------------------------------------------
// Diagonal law for determinant-restricted cosets (the SL extension). The
// hidden group's torus is constrained to tuples whose product lies in the
// index-d subgroup S of F_q^*; the diagonal weight of M is the squared
// magnitude of the character sum over that torus. Strict lower entries stay
// uniform. Only needed when d > 1; weights are irrational in general, so
// this law is sampled and compared in floating point.

class DiagonalLaw {
public:
    DiagonalLaw(const FieldCtx& f, int k, std::uint32_t subgroup_index)
        : f_(&f), k_(k), d_(subgroup_index) {
        const std::uint64_t q = f.q();
        std::uint64_t torus = 1, diag = 1;
        for (int i = 0; i < k; ++i) {
            torus *= (q - 1);
            diag *= q;
            if (torus > (1u << 20) || diag > (1u << 20))
                throw std::domain_error("diagonal law enumeration cap exceeded");
        }
        // torus tuples with product in S
        const std::uint64_t member_exp = (q - 1) / std::gcd<std::uint64_t>(d_, q - 1);
        std::vector<std::vector<FqElem>> tuples;
        for (std::uint64_t i = 0; i < torus; ++i) {
            std::vector<FqElem> t(k);
            FqElem prod = f.one();
            std::uint64_t c = i;
            for (int j = 0; j < k; ++j) {
                t[j] = f.element(1 + c % (q - 1));
                c /= (q - 1);
                prod = f.mul(prod, t[j]);
            }
            if (f.pow(prod, member_exp) == f.one()) tuples.push_back(std::move(t));
        }

        weights_.resize(diag);
        cumulative_.resize(diag);
        double total = 0.0;
        for (std::uint64_t code = 0; code < diag; ++code) {
            std::vector<FqElem> m(k);
            std::uint64_t c = code;
            for (int j = 0; j < k; ++j) { m[j] = f.element(c % q); c /= q; }
            std::complex<double> sum = 0.0;
            for (const auto& t : tuples) {
                FqElem acc = f.zero();
                for (int j = 0; j < k; ++j) acc = f.add(acc, f.mul(t[j], m[j]));
                sum += f.char_of_trace(acc);
            }
            weights_[code] = std::norm(sum);
            total += weights_[code];
            cumulative_[code] = total;
        }
        total_ = total;
        torus_size_ = tuples.size();
    }

    double weight_of_code(std::uint64_t code) const { return weights_[code]; }
    double total_weight() const { return total_; }
    std::uint64_t torus_size() const { return torus_size_; }

    // Diagonal entries of M, drawn with probability weight/total.
    std::vector<FqElem> sample(Rng& rng) const {
        const double target = rng.unit() * total_;
        std::size_t lo = 0, hi = cumulative_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cumulative_[mid] > target) hi = mid; else lo = mid + 1;
        }
        std::vector<FqElem> out(k_);
        std::uint64_t c = lo;
        for (int j = 0; j < k_; ++j) { out[j] = f_->element(c % f_->q()); c /= f_->q(); }
        return out;
    }

private:
    const FieldCtx* f_;
    int k_;
    std::uint32_t d_;
    std::uint64_t torus_size_ = 0;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
    double total_ = 0.0;
};

// ---------------------------------------------------------------------------
// Exact post-QFT outcome distribution for a true Borel coset state, plus the
// definitional character-sum law used to certify it.

class OutcomeDistribution {
public:
    enum class Backend { ClosedForm, CharacterSum, DetConstrained };

    // Closed-form law (GL case). P(Y) = 0 unless M = X B Y^T X^{-1} has zero
    // strict upper part; otherwise P(Y) = q^{n(n-1)} (q-1)^{2z} / D with z the
    // number of zero diagonal entries of M and D = (q-1)^n q^{n(n-1)/2 + n^2}.
    static OutcomeDistribution exact(const MatFq& x, const MatFq& b) {
        OutcomeDistribution d(x, b, Backend::ClosedForm, 1);
        return d;
    }

    // Definitional law: amplitudes summed over the hidden subgroup's
    // elements. det_subgroup_index = 1 gives the GL law; d > 1 restricts the
    // torus to determinants in the index-d subgroup (SL extension).
    static OutcomeDistribution brute_force(const MatFq& x, const MatFq& b,
                                           std::uint32_t det_subgroup_index = 1) {
        OutcomeDistribution d(x, b, Backend::CharacterSum, det_subgroup_index);
        d.build_dense();
        return d;
    }

    // Determinant-constrained closed-ish law: uniform strict lower part and
    // DiagonalLaw weights on the diagonal of M.
    static OutcomeDistribution det_constrained(const MatFq& x, const MatFq& b,
                                               std::uint32_t det_subgroup_index) {
        OutcomeDistribution d(x, b, Backend::DetConstrained, det_subgroup_index);
        d.law_.emplace(d.x_.field(), d.n_, det_subgroup_index);
        return d;
    }

    const FieldCtx& field() const { return x_.field(); }
    int degree() const { return n_; }
    Backend backend() const { return backend_; }

    std::uint64_t outcome_count() const {
        std::uint64_t total = 1;
        for (int i = 0; i < n_ * n_; ++i) {
            total *= field().q();
            if (total > (std::uint64_t(1) << 20)) throw std::domain_error("outcome space too large");
        }
        return total;
    }

    double prob(const MatFq& y) const {
        switch (backend_) {
            case Backend::ClosedForm: {
                const auto strata = stratum_of(y);
                if (!strata) return 0.0;
                const double q = field().q();
                return std::pow(q, n_ * (n_ - 1) - n_ * (n_ - 1) / 2 - n_ * n_) *
                       std::pow(q - 1.0, 2.0 * *strata - n_);
            }
            case Backend::DetConstrained: {
                const MatFq m = coset_m_of_y(x_, b_, y);
                const FieldCtx& f = field();
                for (int i = 0; i < n_; ++i)
                    for (int j = i + 1; j < n_; ++j)
                        if (!f.is_zero(m.at(i, j))) return 0.0;
                std::uint64_t code = 0, mul = 1;
                for (int i = 0; i < n_; ++i) { code += m.at(i, i).v * mul; mul *= f.q(); }
                std::uint64_t low = 1;
                for (int i = 0; i < n_ * (n_ - 1) / 2; ++i) low *= f.q();
                return law_->weight_of_code(code) / (law_->total_weight() * static_cast<double>(low));
            }
            case Backend::CharacterSum:
                return dense_[matrix_code(y)];
        }
        return 0.0;
    }

    // Exact rational probability; closed-form backend only.
    Rational prob_rational(const MatFq& y) const {
        require_closed_form();
        const auto strata = stratum_of(y);
        if (!strata) return Rational(0);
        return stratum_mass(*strata);
    }

    // Probability mass of the perp stratum (M strictly lower triangular):
    // equals ((q-1)/q)^n.
    Rational perp_mass() const {
        require_closed_form();
        const std::uint32_t q = field().q();
        std::uint64_t count = 1;
        for (int i = 0; i < n_ * (n_ - 1) / 2; ++i) count *= q;
        return Rational(static_cast<long long>(count)) * stratum_mass(n_);
    }

    // Mass of the success event: Y in the perp stratum with rank n-1, i.e.
    // M strictly lower triangular with all subdiagonal entries nonzero.
    // Equals ((q-1)/q)^{2n-1}; computed here by enumerating the stratum and
    // checking ranks so the formula can be certified against it.
    Rational success_mass() const {
        require_closed_form();
        const FieldCtx& f = field();
        const int slots = n_ * (n_ - 1) / 2;
        std::uint64_t count = 1;
        for (int i = 0; i < slots; ++i) count *= f.q();
        std::uint64_t hits = 0;
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            MatFq m(f, n_, n_);
            std::uint64_t c = idx;
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < i; ++j) { m.at(i, j) = f.element(c % f.q()); c /= f.q(); }
            if (n_ == 1 || mat_rank(m) == n_ - 1) ++hits;
        }
        return Rational(static_cast<long long>(hits)) * stratum_mass(n_);
    }

    Rational total_mass_rational() const {
        require_closed_form();
        // sum over all lower triangular M
        const FieldCtx& f = field();
        const int low_slots = n_ * (n_ - 1) / 2;
        std::uint64_t low = 1;
        for (int i = 0; i < low_slots; ++i) low *= f.q();
        Rational total(0);
        for (int z = 0; z <= n_; ++z) {
            // choose which z diagonal entries vanish; the rest are units
            std::uint64_t combos = binomial(n_, z);
            std::uint64_t unit_choices = 1;
            for (int i = 0; i < n_ - z; ++i) unit_choices *= (f.q() - 1);
            total += Rational(static_cast<long long>(combos * unit_choices * low)) * stratum_mass(z);
        }
        return total;
    }

    double total_mass() const {
        if (backend_ == Backend::ClosedForm) return boost::rational_cast<double>(total_mass_rational());
        if (backend_ == Backend::CharacterSum) {
            double s = 0.0;
            for (double v : dense_) s += v;
            return s;
        }
        double s = 0.0;
        const std::uint64_t outcomes = outcome_count();
        for (std::uint64_t i = 0; i < outcomes; ++i) s += prob(matrix_from_index(field(), n_, n_, i));
        return s;
    }

    MatFq outcome(std::uint64_t index) const { return matrix_from_index(field(), n_, n_, index); }

private:
    OutcomeDistribution(const MatFq& x, const MatFq& b, Backend be, std::uint32_t d)
        : x_(x), b_(b), backend_(be), det_index_(d), n_(x.rows()) {
        if (!x_.is_square() || !b_.is_square() || x_.rows() != b_.rows())
            throw std::invalid_argument("conjugator and representative must be square of equal size");
        if (mat_rank(x_) != n_ || mat_rank(b_) != n_)
            throw std::invalid_argument("conjugator and representative must be invertible");
    }

    void require_closed_form() const {
        if (backend_ != Backend::ClosedForm)
            throw std::logic_error("rational probabilities require the closed-form backend");
    }

    // Number of zero diagonal entries of M when the strict upper part
    // vanishes; nullopt when Y is off the support.
    std::optional<int> stratum_of(const MatFq& y) const {
        const MatFq m = coset_m_of_y(x_, b_, y);
        const FieldCtx& f = field();
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (!f.is_zero(m.at(i, j))) return std::nullopt;
        int zeros = 0;
        for (int i = 0; i < n_; ++i)
            if (f.is_zero(m.at(i, i))) ++zeros;
        return zeros;
    }

    // Per-outcome mass q^{n(n-1)} (q-1)^{2z} / ((q-1)^n q^{n(n-1)/2 + n^2}).
    Rational stratum_mass(int zeros) const {
        const std::uint32_t q = field().q();
        const long long num =
            checked_mul_ll(checked_pow_ll(q, static_cast<std::uint32_t>(n_ * (n_ - 1))),
                           checked_pow_ll(q - 1, static_cast<std::uint32_t>(2 * zeros)));
        const long long den =
            checked_mul_ll(checked_pow_ll(q - 1, static_cast<std::uint32_t>(n_)),
                           checked_pow_ll(q, static_cast<std::uint32_t>(n_ * (n_ - 1) / 2 + n_ * n_)));
        return Rational(num, den);
    }

    static std::uint64_t binomial(int n, int k) {
        std::uint64_t r = 1;
        for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
        return r;
    }

    std::uint64_t matrix_code(const MatFq& y) const {
        std::uint64_t code = 0, mul = 1;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) { code += static_cast<std::uint64_t>(y.at(i, j).v) * mul; mul *= field().q(); }
        return code;
    }

    void build_dense() {
        const FieldCtx& f = field();
        const std::uint64_t outcomes = outcome_count();

        // enumerate the hidden subgroup's elements mapped through the coset:
        // T_A = X^{-1} A X B for A lower triangular invertible (det class 0)
        const int low_slots = n_ * (n_ - 1) / 2;
        std::uint64_t low = 1, diag = 1;
        for (int i = 0; i < low_slots; ++i) low *= f.q();
        for (int i = 0; i < n_; ++i) diag *= (f.q() - 1);
        if (low * diag * outcomes > (std::uint64_t(1) << 28))
            throw std::domain_error("character-sum law too large");

        const std::uint64_t member_exp = (f.q() - 1) / std::gcd<std::uint64_t>(det_index_, f.q() - 1);
        const MatFq xi = inverse(x_);
        std::vector<MatFq> coset_elems;
        for (std::uint64_t di = 0; di < diag; ++di) {
            MatFq a(f, n_, n_);
            std::uint64_t c = di;
            FqElem dprod = f.one();
            for (int i = 0; i < n_; ++i) {
                a.at(i, i) = f.element(1 + c % (f.q() - 1));
                c /= (f.q() - 1);
                dprod = f.mul(dprod, a.at(i, i));
            }
            if (det_index_ > 1 && f.pow(dprod, member_exp) != f.one()) continue;
            for (std::uint64_t li = 0; li < low; ++li) {
                MatFq al = a;
                std::uint64_t lc = li;
                for (int i = 0; i < n_; ++i)
                    for (int j = 0; j < i; ++j) { al.at(i, j) = f.element(lc % f.q()); lc /= f.q(); }
                coset_elems.push_back(mat_mul(xi, mat_mul(al, mat_mul(x_, b_))));
            }
        }

        const double norm = 1.0 / (static_cast<double>(coset_elems.size()) * static_cast<double>(outcomes));
        dense_.assign(outcomes, 0.0);
        for (std::uint64_t yi = 0; yi < outcomes; ++yi) {
            const MatFq y = matrix_from_index(f, n_, n_, yi);
            std::complex<double> sum = 0.0;
            for (const MatFq& t : coset_elems) sum += f.char_of_trace(frobenius_form(t, y));
            dense_[yi] = std::norm(sum) * norm;
        }
    }

    MatFq x_, b_;
    Backend backend_;
    std::uint32_t det_index_;
    int n_;
    std::vector<double> dense_;
    std::optional<DiagonalLaw> law_;
};

// ---------------------------------------------------------------------------
// Direct sampler for the exact law: build M (strict upper part zero, strict
// lower uniform, diagonal from its marginal law) and map back to Y. The
// hidden conjugator is used here because the sampler plays the physics; the
// solver only ever sees Y.

inline MatFq sample_outcome(const MatFq& x, const MatFq& b, Rng& rng,
                            const DiagonalLaw* law = nullptr) {
    const FieldCtx& f = x.field();
    const int n = x.rows();
    MatFq m(f, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) m.at(i, j) = f.random(rng);
    if (law == nullptr) {
        // each diagonal entry: 0 with probability (q-1)/q, otherwise uniform
        // over the units with aggregate mass 1/q
        const std::uint64_t q = f.q();
        for (int i = 0; i < n; ++i) {
            const std::uint64_t t = rng.below(q * (q - 1));
            if (t < (q - 1) * (q - 1))
                m.at(i, i) = f.zero();
            else
                m.at(i, i) = f.element(1 + (t - (q - 1) * (q - 1)));
        }
    } else {
        const std::vector<FqElem> diag = law->sample(rng);
        for (int i = 0; i < n; ++i) m.at(i, i) = diag[i];
    }
    return coset_y_of_m(x, b, m);
}

// Sample from an explicitly enumerated law (used by the brute-force solver
// backend at tiny sizes).
inline MatFq sample_outcome_dense(const OutcomeDistribution& dist, Rng& rng) {
    const std::uint64_t outcomes = dist.outcome_count();
    const double target = rng.unit();
    double acc = 0.0;
    for (std::uint64_t i = 0; i < outcomes; ++i) {
        const MatFq y = dist.outcome(i);
        acc += dist.prob(y);
        if (acc >= target) return y;
    }
    return dist.outcome(outcomes - 1);
}

// ---------------------------------------------------------------------------
// Round statistics derived from the exact law.

// P(uniform Mat_{k x k} draw is invertible with determinant in the index-d
// subgroup) = (1/d) * prod_{j=1..k} (1 - q^{-j}).
inline Rational prep_success_probability(const FieldCtx& f, int k, std::uint32_t det_subgroup_index = 1) {
    const std::uint32_t q = f.q();
    Rational p(1);
    for (int j = 1; j <= k; ++j) {
        const long long qj = checked_pow_ll(q, static_cast<std::uint32_t>(j));
        p *= Rational(qj - 1, qj);
    }
    return p / Rational(static_cast<long long>(det_subgroup_index));
}

// P over the exact law that the measured Y has rank k-1 and the kernel of
// Y^T is the hidden line, i.e. M has zero last column and independent first
// k-1 columns. This is the event verify_guess accepts, so together with the
// preparation factor it is the per-round success probability of the solver.
inline double guess_success_given_coset(const FieldCtx& f, int k, std::uint32_t det_subgroup_index = 1) {
    if (k == 1) return 1.0;
    const std::uint64_t q = f.q();
    std::uint64_t diag = 1, low = 1;
    for (int i = 0; i < k; ++i) diag *= q;
    for (int i = 0; i < k * (k - 1) / 2; ++i) low *= q;
    if (diag * low > (std::uint64_t(1) << 22)) throw std::domain_error("success enumeration cap exceeded");

    std::optional<DiagonalLaw> law;
    if (det_subgroup_index > 1) law.emplace(f, k, det_subgroup_index);

    const Subspace last_line = Subspace::span(f, k, {unit_vector(f, k, k - 1)});
    double success = 0.0, total = 0.0;
    for (std::uint64_t dcode = 0; dcode < diag; ++dcode) {
        double w;
        if (law) {
            w = law->weight_of_code(dcode);
        } else {
            w = 1.0;
            std::uint64_t c = dcode;
            for (int i = 0; i < k; ++i) {
                w *= (c % q == 0) ? static_cast<double>((q - 1) * (q - 1)) : 1.0;
                c /= q;
            }
        }
        if (w == 0.0) continue;
        for (std::uint64_t lcode = 0; lcode < low; ++lcode) {
            MatFq m(f, k, k);
            std::uint64_t c = dcode;
            for (int i = 0; i < k; ++i) { m.at(i, i) = f.element(c % q); c /= q; }
            c = lcode;
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < i; ++j) { m.at(i, j) = f.element(c % q); c /= q; }
            total += w;
            if (mat_rank(m) == k - 1 && kernel(m) == last_line) success += w;
        }
    }
    return success / total;
}

inline double verified_round_success_probability(const FieldCtx& f, int k,
                                                 std::uint32_t det_subgroup_index = 1) {
    return boost::rational_cast<double>(prep_success_probability(f, k, det_subgroup_index)) *
           guess_success_given_coset(f, k, det_subgroup_index);
}

}  // namespace hbs
