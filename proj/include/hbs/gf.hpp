#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hbs/rng.hpp"

namespace hbs {

// Element of F_{p^r}, stored as the integer code sum coeffs[i] * p^i of its
// residue polynomial (little-endian coefficients). Code 0 is the zero
// element; codes enumerate the field in a fixed order used everywhere for
// reproducible iteration and wire encoding.
struct FqElem {
    std::uint32_t v = 0;
    friend bool operator==(const FqElem&, const FqElem&) = default;
    friend auto operator<=>(const FqElem&, const FqElem&) = default;
};

// Arithmetic context for F_q, q = p^r. Immutable after construction and
// shareable across threads; all operations are pure.
//
// The modulus is the first monic irreducible polynomial of degree r over F_p
// in code order (non-leading coefficients read as a base-p integer), so a
// given (p, r) always produces the same field representation. Multiplication
// and inversion go through exp/log tables built from a fixed generator of
// F_q^*; n-th roots are found by direct search over the units, which is exact
// and cheap at the supported sizes.
class FieldCtx {
public:
    static constexpr std::uint64_t kOrderCap = 1u << 20;

    FieldCtx(std::uint32_t p, std::uint32_t r) : p_(p), r_(r) {
        if (r_ < 1) throw std::invalid_argument("extension degree must be >= 1");
        if (!is_prime(p_)) throw std::invalid_argument("characteristic must be prime");
        q_ = 1;
        for (std::uint32_t i = 0; i < r_; ++i) {
            q_ *= p_;
            if (q_ > kOrderCap) throw std::invalid_argument("field order exceeds cap 2^20");
        }
        choose_modulus();
        build_tables();
    }

    std::uint32_t p() const { return p_; }
    std::uint32_t r() const { return r_; }
    std::uint32_t q() const { return static_cast<std::uint32_t>(q_); }
    const std::vector<std::uint32_t>& modulus() const { return mod_; }

    FqElem zero() const { return {0}; }
    FqElem one() const { return {1}; }

    FqElem element(std::uint64_t code) const {
        if (code >= q_) throw std::out_of_range("element code out of range");
        return {static_cast<std::uint32_t>(code)};
    }

    std::vector<std::uint32_t> coeffs(FqElem a) const {
        std::vector<std::uint32_t> c(r_);
        std::uint32_t v = a.v;
        for (std::uint32_t i = 0; i < r_; ++i) { c[i] = v % p_; v /= p_; }
        return c;
    }

    bool is_zero(FqElem a) const { return a.v == 0; }

    FqElem add(FqElem a, FqElem b) const {
        std::uint32_t out = 0, mul = 1, x = a.v, y = b.v;
        for (std::uint32_t i = 0; i < r_; ++i) {
            out += ((x + y) % p_) * mul;
            x /= p_; y /= p_; mul *= p_;
        }
        return {out};
    }

    FqElem neg(FqElem a) const {
        std::uint32_t out = 0, mul = 1, x = a.v;
        for (std::uint32_t i = 0; i < r_; ++i) {
            out += ((p_ - x % p_) % p_) * mul;
            x /= p_; mul *= p_;
        }
        return {out};
    }

    FqElem sub(FqElem a, FqElem b) const { return add(a, neg(b)); }

    FqElem mul(FqElem a, FqElem b) const {
        if (a.v == 0 || b.v == 0) return {0};
        return exp_[(static_cast<std::uint64_t>(log_[a.v]) + log_[b.v]) % (q_ - 1)];
    }

    FqElem inv(FqElem a) const {
        if (a.v == 0) throw std::domain_error("inverse of zero");
        return exp_[(q_ - 1 - log_[a.v]) % (q_ - 1)];
    }

    FqElem pow(FqElem a, std::uint64_t e) const {
        if (a.v == 0) return e == 0 ? one() : zero();
        const std::uint64_t le = (static_cast<std::uint64_t>(log_[a.v]) * (e % (q_ - 1))) % (q_ - 1);
        return exp_[le];
    }

    // Absolute trace to F_p: sum of the r Frobenius images x^(p^i).
    std::uint32_t trace(FqElem a) const { return trace_[a.v]; }

    // Additive character value omega^{Tr(xy)}, omega = exp(2*pi*i/p).
    std::complex<double> character(FqElem x, FqElem y) const {
        return roots_[trace_[mul(x, y).v]];
    }

    std::complex<double> char_of_trace(FqElem x) const { return roots_[trace_[x.v]]; }

    // Smallest z (in code order) with z^n = x, if any. Absent exactly when x
    // is not an n-th power, i.e. x^((q-1)/gcd(n, q-1)) != 1.
    std::optional<FqElem> nth_root(FqElem x, std::uint32_t n) const {
        if (x.v == 0) throw std::domain_error("nth_root of zero");
        if (n == 0) throw std::invalid_argument("root index must be positive");
        for (std::uint64_t code = 1; code < q_; ++code) {
            FqElem z{static_cast<std::uint32_t>(code)};
            if (pow(z, n) == x) return z;
        }
        return std::nullopt;
    }

    // All q elements (or q-1 units) in code order.
    std::vector<FqElem> all_elements() const {
        std::vector<FqElem> out(q_);
        for (std::uint64_t i = 0; i < q_; ++i) out[i] = {static_cast<std::uint32_t>(i)};
        return out;
    }

    std::vector<FqElem> all_units() const {
        std::vector<FqElem> out(q_ - 1);
        for (std::uint64_t i = 1; i < q_; ++i) out[i - 1] = {static_cast<std::uint32_t>(i)};
        return out;
    }

    FqElem random(Rng& rng) const { return {static_cast<std::uint32_t>(rng.below(q_))}; }

    FqElem random_unit(Rng& rng) const { return {static_cast<std::uint32_t>(1 + rng.below(q_ - 1))}; }

    // Fixed generator of the multiplicative group (smallest in code order).
    FqElem unit_generator() const { return exp_[1]; }

    bool same_field(const FieldCtx& o) const {
        return p_ == o.p_ && r_ == o.r_ && mod_ == o.mod_;
    }

    static bool is_prime(std::uint64_t n) {
        if (n < 2) return false;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

private:
    // Polynomials over F_p, little-endian coefficient vectors.
    using Poly = std::vector<std::uint32_t>;

    static void ptrim(Poly& a) {
        while (!a.empty() && a.back() == 0) a.pop_back();
    }

    Poly pmulmod(const Poly& a, const Poly& b) const {
        Poly c(a.size() + b.size() - 1, 0);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
                c[i + j] = (c[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p_;
        // reduce mod the field modulus
        for (std::size_t d = c.size(); d-- > r_;) {
            const std::uint32_t coef = c[d];
            if (coef == 0) continue;
            c[d] = 0;
            for (std::uint32_t i = 0; i < r_; ++i) {
                const std::uint64_t sub = static_cast<std::uint64_t>(coef) * mod_[i] % p_;
                c[d - r_ + i] = static_cast<std::uint32_t>((c[d - r_ + i] + p_ - sub) % p_);
            }
        }
        c.resize(r_, 0);
        return c;
    }

    std::uint32_t pencode(const Poly& a) const {
        std::uint32_t v = 0, mul = 1;
        for (std::uint32_t i = 0; i < r_; ++i) {
            if (i < a.size()) v += a[i] * mul;
            mul *= p_;
        }
        return v;
    }

    // Remainder of a(x) by b(x) over F_p (b monic not required).
    static Poly pmod(Poly a, const Poly& b, std::uint32_t p) {
        ptrim(a);
        Poly bb = b;
        ptrim(bb);
        const std::size_t db = bb.size() - 1;
        // inverse of b's leading coefficient mod p
        std::uint32_t lead_inv = 1;
        for (std::uint32_t t = 1; t < p; ++t)
            if (t * static_cast<std::uint64_t>(bb[db]) % p == 1) { lead_inv = t; break; }
        while (a.size() > db) {
            const std::size_t da = a.size() - 1;
            const std::uint64_t f = static_cast<std::uint64_t>(a[da]) * lead_inv % p;
            if (f != 0)
                for (std::size_t i = 0; i <= db; ++i)
                    a[da - db + i] = static_cast<std::uint32_t>((a[da - db + i] + p - f * bb[i] % p) % p);
            a.pop_back();
            ptrim(a);
            if (a.empty()) break;
        }
        return a;
    }

    // Irreducibility by trial division: a monic f of degree r is reducible
    // iff some monic polynomial of degree in [1, r/2] divides it.
    bool poly_irreducible(const Poly& f) const {
        const std::uint32_t deg = r_;
        for (std::uint32_t d = 1; 2 * d <= deg; ++d) {
            std::uint64_t count = 1;
            for (std::uint32_t i = 0; i < d; ++i) count *= p_;
            for (std::uint64_t code = 0; code < count; ++code) {
                Poly g(d + 1, 0);
                std::uint64_t c = code;
                for (std::uint32_t i = 0; i < d; ++i) { g[i] = c % p_; c /= p_; }
                g[d] = 1;
                if (pmod(f, g, p_).empty()) return false;
            }
        }
        return true;
    }

    void choose_modulus() {
        if (r_ == 1) {
            mod_ = {0, 1};  // x
            return;
        }
        std::uint64_t count = 1;
        for (std::uint32_t i = 0; i < r_; ++i) count *= p_;
        for (std::uint64_t code = 0; code < count; ++code) {
            Poly f(r_ + 1, 0);
            std::uint64_t c = code;
            for (std::uint32_t i = 0; i < r_; ++i) { f[i] = c % p_; c /= p_; }
            f[r_] = 1;
            if (poly_irreducible(f)) {
                mod_ = f;
                return;
            }
        }
        throw std::logic_error("no irreducible modulus found");  // cannot happen
    }

    void build_tables() {
        // generator search: order of g is q-1 iff g^((q-1)/s) != 1 for every
        // prime s dividing q-1
        std::vector<std::uint64_t> prime_factors;
        {
            std::uint64_t m = q_ - 1;
            for (std::uint64_t d = 2; d * d <= m; ++d)
                if (m % d == 0) {
                    prime_factors.push_back(d);
                    while (m % d == 0) m /= d;
                }
            if (m > 1) prime_factors.push_back(m);
        }
        auto pow_poly = [&](std::uint32_t base_code, std::uint64_t e) {
            Poly base = decode_poly(base_code), acc = {1};
            while (e) {
                if (e & 1) acc = pmulmod(acc, base);
                base = pmulmod(base, base);
                e >>= 1;
            }
            return pencode(acc);
        };
        std::uint32_t gen = 0;
        for (std::uint32_t cand = 1; cand < q_; ++cand) {
            if (q_ == 2) { gen = 1; break; }
            bool ok = pow_poly(cand, q_ - 1) == 1;
            for (std::uint64_t s : prime_factors)
                if (ok && pow_poly(cand, (q_ - 1) / s) == 1) ok = false;
            if (ok) { gen = cand; break; }
        }
        if (gen == 0) throw std::logic_error("no multiplicative generator found");

        exp_.resize(q_ - 1);
        log_.assign(q_, 0);
        Poly acc = {1};
        const Poly g = decode_poly(gen);
        for (std::uint64_t i = 0; i < q_ - 1; ++i) {
            const std::uint32_t code = pencode(acc);
            exp_[i] = {code};
            log_[code] = static_cast<std::uint32_t>(i);
            acc = pmulmod(acc, g);
        }
        if (pencode(acc) != 1) throw std::logic_error("generator order mismatch");

        // trace table; the Frobenius-power sum must land in F_p
        trace_.resize(q_);
        for (std::uint64_t code = 0; code < q_; ++code) {
            FqElem x{static_cast<std::uint32_t>(code)}, acc_e = zero();
            std::uint64_t pe = 1;
            for (std::uint32_t i = 0; i < r_; ++i) {
                acc_e = add(acc_e, pow_frob(x, pe));
                pe *= p_;
            }
            if (acc_e.v >= p_) throw std::logic_error("trace not in prime field");
            trace_[code] = acc_e.v;
        }

        roots_.resize(p_);
        constexpr double kTau = 6.283185307179586476925286766559;
        for (std::uint32_t k = 0; k < p_; ++k)
            roots_[k] = std::polar(1.0, kTau * k / p_);
    }

    FqElem pow_frob(FqElem a, std::uint64_t pe) const {
        if (a.v == 0) return a;
        return exp_[(static_cast<std::uint64_t>(log_[a.v]) * (pe % (q_ - 1))) % (q_ - 1)];
    }

    Poly decode_poly(std::uint32_t code) const {
        Poly c(r_);
        for (std::uint32_t i = 0; i < r_; ++i) { c[i] = code % p_; code /= p_; }
        ptrim(c);
        if (c.empty()) c = {0};
        return c;
    }

    std::uint32_t p_, r_;
    std::uint64_t q_;
    Poly mod_;
    std::vector<FqElem> exp_;
    std::vector<std::uint32_t> log_;
    std::vector<std::uint32_t> trace_;
    std::vector<std::complex<double>> roots_;
};

}  // namespace hbs
