#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "hbs/linalg.hpp"

namespace hbs {

// Complete flag F_q^n > U_1 > ... > U_{n-1} > 0 with dim U_k = n-k.
// members[k-1] holds U_k; a flag over F_q^1 has no members.
struct Flag {
    int n = 1;
    std::vector<Subspace> members;

    friend bool operator==(const Flag&, const Flag&) = default;
};

inline void validate_flag(const Flag& f) {
    if (static_cast<int>(f.members.size()) != f.n - 1)
        throw std::invalid_argument("flag must have n-1 members");
    for (int k = 0; k < f.n - 1; ++k) {
        if (f.members[k].dim() != f.n - 1 - k) throw std::invalid_argument("flag member has wrong dimension");
        if (f.members[k].ambient_dim() != f.n) throw std::invalid_argument("flag member has wrong ambient space");
        if (k > 0 && !f.members[k - 1].contains(f.members[k]))
            throw std::invalid_argument("flag members must be nested");
    }
}

// Instance bundle: the flag plus, when the instance came from a sampled
// conjugator, that conjugator (test harness use only).
struct BorelDescriptor {
    Flag flag;
    std::optional<MatFq> conjugator;
};

// V_k = span(e_{k+1}, ..., e_n): column vectors whose first k entries vanish.
inline Flag standard_flag(const FieldCtx& f, int n) {
    Flag out;
    out.n = n;
    for (int k = 1; k < n; ++k) {
        std::vector<VecFq> basis;
        for (int i = k; i < n; ++i) basis.push_back(unit_vector(f, n, i));
        out.members.push_back(Subspace::span(f, n, basis));
    }
    return out;
}

// Flag with members X^{-1} V_k; its stabilizer is X^{-1} L X for L the
// invertible lower triangular group.
inline Flag flag_from_conjugator(const MatFq& x) {
    const FieldCtx& f = x.field();
    const int n = x.rows();
    const MatFq xi = inverse(x);
    Flag std_f = standard_flag(f, n);
    Flag out;
    out.n = n;
    for (const Subspace& v : std_f.members) out.members.push_back(subspace_image(xi, v));
    return out;
}

// True iff A U_k is contained in U_k for every member.
inline bool stabilizes(const MatFq& a, const Flag& flag) {
    if (a.rows() != flag.n || a.cols() != flag.n) throw std::invalid_argument("dimension mismatch");
    for (const Subspace& u : flag.members) {
        for (const VecFq& b : u.basis())
            if (!u.contains(mat_vec_mul(a, b))) return false;
    }
    return true;
}

// Invertible S whose columns are a basis adapted to the flag: the last
// column spans U_{n-1}, the last two span U_{n-2}, and so on. Then
// S V_k = U_k, so X = S^{-1} satisfies flag_from_conjugator(X) == flag.
inline MatFq adapted_basis(const FieldCtx& f, const Flag& flag) {
    const int n = flag.n;
    MatFq s(f, n, n);
    std::vector<VecFq> chosen;
    for (int k = n - 1; k >= 0; --k) {
        // columns fill right to left; level k draws from U_k (U_0 = full space)
        const Subspace level = (k == 0) ? Subspace::full(f, n) : flag.members[k - 1];
        Subspace have = Subspace::span(f, n, chosen);
        for (const VecFq& cand : level.basis()) {
            if (have.contains(cand)) continue;
            chosen.push_back(cand);
            have = Subspace::span(f, n, chosen);
            break;
        }
        if (static_cast<int>(chosen.size()) != n - k) throw std::invalid_argument("invalid flag");
        for (int i = 0; i < n; ++i) s.at(i, k) = chosen.back().at(i);
    }
    return s;
}

// Generating set for the flag stabilizer: conjugates of the diagonal torus
// generators and of the subdiagonal transvections I + g E_{i+1,i}.
inline std::vector<MatFq> stabilizer_generators(const Flag& flag, const FieldCtx& f) {
    const int n = flag.n;
    const MatFq s = adapted_basis(f, flag);
    const MatFq si = inverse(s);
    const FqElem g = f.q() > 2 ? f.unit_generator() : f.one();
    std::vector<MatFq> gens;
    auto push = [&](const MatFq& m) { gens.push_back(mat_mul(s, mat_mul(m, si))); };
    if (f.q() > 2) {
        for (int i = 0; i < n; ++i) {
            MatFq d = identity_matrix(f, n);
            d.at(i, i) = g;
            push(d);
        }
    }
    for (int i = 0; i + 1 < n; ++i) {
        MatFq t = identity_matrix(f, n);
        t.at(i + 1, i) = g;
        push(t);
    }
    if (gens.empty()) gens.push_back(identity_matrix(f, n));  // n=1, q=2
    return gens;
}

// Generators for the stabilizer elements whose determinant is an n0-th power
// in F_q^*: determinant-one torus ratios, the transvections, and one torus
// element of determinant g^{n0}.
inline std::vector<MatFq> stabilizer_generators_det_power(const Flag& flag, const FieldCtx& f,
                                                          std::uint32_t n0) {
    const int n = flag.n;
    const MatFq s = adapted_basis(f, flag);
    const MatFq si = inverse(s);
    const FqElem g = f.q() > 2 ? f.unit_generator() : f.one();
    std::vector<MatFq> gens;
    auto push = [&](const MatFq& m) { gens.push_back(mat_mul(s, mat_mul(m, si))); };
    if (f.q() > 2) {
        for (int i = 0; i + 1 < n; ++i) {
            MatFq d = identity_matrix(f, n);
            d.at(i, i) = g;
            d.at(i + 1, i + 1) = f.inv(g);
            push(d);
        }
        MatFq d = identity_matrix(f, n);
        d.at(n - 1, n - 1) = f.pow(g, n0);
        push(d);
    }
    for (int i = 0; i + 1 < n; ++i) {
        MatFq t = identity_matrix(f, n);
        t.at(i + 1, i) = g;
        push(t);
    }
    if (gens.empty()) gens.push_back(identity_matrix(f, n));
    return gens;
}

constexpr std::uint64_t kBorelEnumerationCap = std::uint64_t(1) << 22;

// All (q-1)^n q^{n(n-1)/2} stabilizer elements, as conjugates of the
// invertible lower triangular matrices. Desk scale only.
inline std::vector<MatFq> enumerate_borel(const Flag& flag, const FieldCtx& f) {
    const int n = flag.n;
    const std::uint64_t q = f.q();
    std::uint64_t total = 1;
    for (int i = 0; i < n * (n + 1) / 2; ++i) {
        total *= q;
        if (total > kBorelEnumerationCap) throw std::domain_error("stabilizer enumeration cap exceeded");
    }
    const MatFq s = adapted_basis(f, flag);
    const MatFq si = inverse(s);

    // odometer over n diagonal unit slots and n(n-1)/2 strict lower slots
    const int diag_slots = n, low_slots = n * (n - 1) / 2;
    std::vector<std::uint32_t> diag(diag_slots, 0), low(low_slots, 0);
    std::vector<MatFq> out;
    for (;;) {
        MatFq a(f, n, n);
        for (int i = 0; i < n; ++i) a.at(i, i) = f.element(1 + diag[i]);
        int slot = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) a.at(i, j) = f.element(low[slot++]);
        out.push_back(mat_mul(s, mat_mul(a, si)));

        int k = 0;
        while (k < diag_slots && ++diag[k] == q - 1) diag[k++] = 0;
        if (k < diag_slots) continue;
        k = 0;
        while (k < low_slots && ++low[k] == q) low[k++] = 0;
        if (k == low_slots) break;
    }
    return out;
}

// Lift a flag over F_q^{n-1} to F_q^n through Z: embed each member with a
// zero last coordinate, adjoin span(e_n), append span(e_n) as the new last
// member, then map everything through Z.
inline Flag lift_flag(const Flag& sub, const MatFq& z) {
    const FieldCtx& f = z.field();
    const int n = z.rows();
    if (sub.n != n - 1) throw std::invalid_argument("sub-flag dimension mismatch");
    Flag out;
    out.n = n;
    const VecFq en = unit_vector(f, n, n - 1);
    for (const Subspace& w : sub.members) {
        std::vector<VecFq> basis;
        for (const VecFq& b : w.basis()) {
            VecFq v(f, n);
            for (int i = 0; i < n - 1; ++i) v.at(i) = b.at(i);
            basis.push_back(v);
        }
        basis.push_back(en);
        out.members.push_back(Subspace::span(f, n, basis));
    }
    out.members.push_back(Subspace::span(f, n, {en}));
    for (std::size_t i = 0; i < out.members.size(); ++i)
        out.members[i] = subspace_image(z, out.members[i]);
    validate_flag(out);
    return out;
}

}  // namespace hbs
