#pragma once

#include <atomic>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hbs/borel.hpp"
#include "hbs/linalg.hpp"

namespace hbs {

// Canonical representative of the orbit of M under left multiplication by
// invertible lower triangular matrices. Rows are processed top to bottom:
// row i is reduced at the pivot columns of the rows already processed (only
// earlier rows are used, which is exactly the lower triangular action), then
// scaled so its leading entry is 1. The result is constant on orbits and
// distinct across orbits; both facts are certified exhaustively in the tests.
inline MatFq lower_canonical_form(const MatFq& m) {
    const FieldCtx& f = m.field();
    MatFq r = m;
    const int n_rows = r.rows(), n_cols = r.cols();
    std::vector<int> pivot(n_rows, -1);
    for (int i = 0; i < n_rows; ++i) {
        for (int j = 0; j < i; ++j) {
            if (pivot[j] < 0) continue;
            const FqElem c = r.at(i, pivot[j]);
            if (f.is_zero(c)) continue;
            for (int t = 0; t < n_cols; ++t)
                r.at(i, t) = f.sub(r.at(i, t), f.mul(c, r.at(j, t)));
        }
        int lead = -1;
        for (int t = 0; t < n_cols; ++t)
            if (!f.is_zero(r.at(i, t))) { lead = t; break; }
        if (lead < 0) continue;
        const FqElem s = f.inv(r.at(i, lead));
        for (int t = 0; t < n_cols; ++t) r.at(i, t) = f.mul(s, r.at(i, t));
        pivot[i] = lead;
    }
    return r;
}

enum class LabelTag : std::uint8_t {
    Coset,      // invertible, inside the oracle's domain
    Singular,   // det(input) = 0
    OffDomain,  // SL mode only: invertible but determinant not an n-th power
};

struct OracleLabel {
    LabelTag tag = LabelTag::Coset;
    std::uint32_t det_class = 0;  // index of det modulo the n-th powers; 0 in domain
    std::vector<std::uint32_t> payload;  // canonical matrix, row-major codes

    friend bool operator==(const OracleLabel&, const OracleLabel&) = default;
    friend auto operator<=>(const OracleLabel&, const OracleLabel&) = default;
};

enum class OracleMode : std::uint8_t { GL, SL };

// The hiding function as a query-counted black box. A hidden conjugator X is
// fixed at construction; query(A) returns the canonical form of XA under the
// lower triangular action, so labels agree exactly on right cosets of
// X^{-1} L X (GL mode) or of its determinant-restricted subgroup (SL mode).
class HidingOracle {
public:
    HidingOracle(const FieldCtx& f, MatFq hidden_x, OracleMode mode)
        : f_(&f), x_(std::move(hidden_x)), mode_(mode), n_(x_.rows()) {
        if (!x_.is_square()) throw std::invalid_argument("hidden conjugator must be square");
        if (mat_rank(x_) != n_) throw std::invalid_argument("hidden conjugator must be invertible");
        if (mode_ == OracleMode::SL) {
            std::uint64_t d = std::gcd<std::uint64_t>(n_, f.q() - 1);
            det_index_ = static_cast<std::uint32_t>(d);
        }
    }

    HidingOracle(HidingOracle&& o) noexcept
        : f_(o.f_), x_(std::move(o.x_)), mode_(o.mode_), n_(o.n_),
          det_index_(o.det_index_), count_(o.count_.load()) {}

    const FieldCtx& field() const { return *f_; }
    int degree() const { return n_; }
    OracleMode mode() const { return mode_; }
    std::uint64_t query_count() const { return count_.load(); }

    // Index of the subgroup of allowed determinants; 1 in GL mode.
    std::uint32_t det_subgroup_index() const { return mode_ == OracleMode::GL ? 1 : det_index_; }

    OracleLabel query(const MatFq& a) {
        if (a.rows() != n_ || a.cols() != n_) throw std::invalid_argument("query dimension mismatch");
        count_.fetch_add(1, std::memory_order_relaxed);
        const FieldCtx& f = *f_;
        const FqElem da = det(a);
        OracleLabel label;
        if (f.is_zero(da)) {
            label.tag = LabelTag::Singular;
            label.payload = lower_canonical_form(mat_mul(x_, a)).encode();
            return label;
        }
        if (mode_ == OracleMode::GL) {
            label.tag = LabelTag::Coset;
            label.payload = lower_canonical_form(mat_mul(x_, a)).encode();
            return label;
        }
        const std::uint32_t cls = det_class(da);
        if (cls != 0) {
            label.tag = LabelTag::OffDomain;
            label.det_class = cls;
            label.payload = lower_canonical_form(mat_mul(x_, a)).encode();
            return label;
        }
        // determinant is an n-th power: divide by a root to land in SL_n,
        // then evaluate the inner function there
        const FqElem z = f.nth_root(da, static_cast<std::uint32_t>(n_)).value();
        const MatFq a0 = scalar_mul(f.inv(z), a);
        label.tag = LabelTag::Coset;
        label.payload = lower_canonical_form(mat_mul(x_, a0)).encode();
        return label;
    }

    // Simulation/test access: the hidden conjugator. Solver logic must not
    // depend on it; the exact-law sampler does (it plays the physics).
    const MatFq& hidden_conjugator() const { return x_; }

    // Position of x inside F_q^* / (n-th powers); 0 means x is an n-th power.
    std::uint32_t det_class(FqElem x) const {
        const FieldCtx& f = *f_;
        const std::uint64_t d = det_subgroup_index();
        if (d == 1) return 0;
        const std::uint64_t power_check = (f.q() - 1) / d;
        const FqElem gi = f.inv(f.unit_generator());
        FqElem cur = x;
        for (std::uint32_t j = 0; j < d; ++j) {
            if (f.pow(cur, power_check) == f.one()) return j;
            cur = f.mul(cur, gi);
        }
        throw std::logic_error("determinant class not found");
    }

private:
    const FieldCtx* f_;
    MatFq x_;
    OracleMode mode_;
    int n_;
    std::uint32_t det_index_ = 1;
    std::atomic<std::uint64_t> count_{0};
};

struct OracleInstance {
    HidingOracle oracle;
    BorelDescriptor descriptor;
};

// Fresh promise-problem instance: X uniform over GL_n, flag = X^{-1} V_k.
inline OracleInstance make_instance(int n, const FieldCtx& f, Rng& rng, OracleMode mode) {
    MatFq x = random_invertible(f, n, rng);
    BorelDescriptor d{flag_from_conjugator(x), x};
    return OracleInstance{HidingOracle(f, std::move(x), mode), std::move(d)};
}

// A view of the oracle after a chain of conjugations and upper-left-block
// restrictions. Queries compose into a single sandwich at the root:
// f_view(A) = f(C diag(A, I) C^{-1}). Views are cheap value types sharing
// the root oracle (and its query counter).
class OracleView {
public:
    explicit OracleView(HidingOracle& root)
        : root_(&root), k_(root.degree()), outer_(identity_matrix(root.field(), root.degree())) {}

    const FieldCtx& field() const { return root_->field(); }
    int degree() const { return k_; }
    HidingOracle& root() const { return *root_; }
    std::uint32_t det_subgroup_index() const { return root_->det_subgroup_index(); }

    // f'(A) = f_view(Z A Z^{-1}); hides the Z-conjugate of this view's subgroup.
    OracleView conjugated(const MatFq& z) const {
        if (z.rows() != k_ || z.cols() != k_) throw std::invalid_argument("conjugator dimension mismatch");
        if (mat_rank(z) != k_) throw std::invalid_argument("conjugator must be invertible");
        OracleView v = *this;
        v.outer_ = mat_mul(outer_, embed(z));
        return v;
    }

    // Restriction to the upper-left (k-1) block; valid once the current
    // level's guess has been verified.
    OracleView restricted() const {
        if (k_ < 2) throw std::invalid_argument("cannot restrict below degree 1");
        OracleView v = *this;
        v.k_ = k_ - 1;
        return v;
    }

    OracleLabel query(const MatFq& a) const {
        if (a.rows() != k_ || a.cols() != k_) throw std::invalid_argument("query dimension mismatch");
        const MatFq wide = mat_mul(outer_, mat_mul(embed(a), inverse(outer_)));
        return root_->query(wide);
    }

    // Effective hidden conjugator of this view (upper-left block of X C);
    // simulation-side only, meaningful once earlier guesses were verified.
    MatFq simulation_conjugator() const {
        const MatFq xc = mat_mul(root_->hidden_conjugator(), outer_);
        MatFq block(field(), k_, k_);
        for (int i = 0; i < k_; ++i)
            for (int j = 0; j < k_; ++j) block.at(i, j) = xc.at(i, j);
        if (mat_rank(block) != k_)
            throw std::logic_error("view conjugator block is singular; restriction before verification?");
        return block;
    }

private:
    MatFq embed(const MatFq& a) const {
        const int n = root_->degree();
        MatFq wide = identity_matrix(field(), n);
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j) wide.at(i, j) = a.at(i, j);
        return wide;
    }

    HidingOracle* root_;
    int k_;
    MatFq outer_;
};

}  // namespace hbs
