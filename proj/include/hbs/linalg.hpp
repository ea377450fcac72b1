#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hbs/gf.hpp"
#include "hbs/rng.hpp"

namespace hbs {

class VecFq;

// Dense matrix over F_q, row-major. Values are immutable by convention once
// built; operations return fresh matrices.
class MatFq {
public:
    MatFq(const FieldCtx& f, int rows, int cols)
        : f_(&f), rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows) * cols, f.zero()) {
        if (rows < 1 || cols < 1) throw std::invalid_argument("matrix dimensions must be >= 1");
    }

    const FieldCtx& field() const { return *f_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    FqElem& at(int i, int j) { return e_[static_cast<std::size_t>(i) * cols_ + j]; }
    const FqElem& at(int i, int j) const { return e_[static_cast<std::size_t>(i) * cols_ + j]; }

    bool is_square() const { return rows_ == cols_; }

    // Row-major integer codes; the wire encoding of a matrix.
    std::vector<std::uint32_t> encode() const {
        std::vector<std::uint32_t> out(e_.size());
        for (std::size_t i = 0; i < e_.size(); ++i) out[i] = e_[i].v;
        return out;
    }

    friend bool operator==(const MatFq& a, const MatFq& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
    }

private:
    const FieldCtx* f_;
    int rows_, cols_;
    std::vector<FqElem> e_;
};

// Column vector over F_q.
class VecFq {
public:
    VecFq(const FieldCtx& f, int n) : f_(&f), e_(n, f.zero()) {
        if (n < 1) throw std::invalid_argument("vector length must be >= 1");
    }

    const FieldCtx& field() const { return *f_; }
    int size() const { return static_cast<int>(e_.size()); }
    FqElem& at(int i) { return e_[i]; }
    const FqElem& at(int i) const { return e_[i]; }

    bool is_zero() const {
        for (const auto& x : e_)
            if (x.v != 0) return false;
        return true;
    }

    std::vector<std::uint32_t> encode() const {
        std::vector<std::uint32_t> out(e_.size());
        for (std::size_t i = 0; i < e_.size(); ++i) out[i] = e_[i].v;
        return out;
    }

    friend bool operator==(const VecFq&, const VecFq&) = default;

private:
    const FieldCtx* f_;
    std::vector<FqElem> e_;

    friend auto operator<=>(const VecFq& a, const VecFq& b) { return a.e_ <=> b.e_; }
};

inline void require_same_shape(const MatFq& a, const MatFq& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix shape mismatch");
    if (!a.field().same_field(b.field())) throw std::invalid_argument("field mismatch");
}

inline MatFq identity_matrix(const FieldCtx& f, int n) {
    MatFq m(f, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = f.one();
    return m;
}

inline MatFq zero_matrix(const FieldCtx& f, int rows, int cols) { return MatFq(f, rows, cols); }

inline VecFq unit_vector(const FieldCtx& f, int n, int k) {
    VecFq v(f, n);
    v.at(k) = f.one();
    return v;
}

inline MatFq mat_add(const MatFq& a, const MatFq& b) {
    require_same_shape(a, b);
    const FieldCtx& f = a.field();
    MatFq c(f, a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c.at(i, j) = f.add(a.at(i, j), b.at(i, j));
    return c;
}

inline MatFq scalar_mul(FqElem s, const MatFq& a) {
    const FieldCtx& f = a.field();
    MatFq c(f, a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c.at(i, j) = f.mul(s, a.at(i, j));
    return c;
}

inline MatFq mat_mul(const MatFq& a, const MatFq& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product shape mismatch");
    const FieldCtx& f = a.field();
    MatFq c(f, a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const FqElem aik = a.at(i, k);
            if (f.is_zero(aik)) continue;
            for (int j = 0; j < b.cols(); ++j)
                c.at(i, j) = f.add(c.at(i, j), f.mul(aik, b.at(k, j)));
        }
    return c;
}

inline VecFq mat_vec_mul(const MatFq& a, const VecFq& v) {
    if (a.cols() != v.size()) throw std::invalid_argument("matrix-vector shape mismatch");
    const FieldCtx& f = a.field();
    VecFq out(f, a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        FqElem acc = f.zero();
        for (int j = 0; j < a.cols(); ++j) acc = f.add(acc, f.mul(a.at(i, j), v.at(j)));
        out.at(i) = acc;
    }
    return out;
}

inline MatFq transpose(const MatFq& a) {
    MatFq c(a.field(), a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c.at(j, i) = a.at(i, j);
    return c;
}

struct RrefResult {
    MatFq rref;
    int rank;
    MatFq transform;  // invertible; transform * input == rref
};

// Reduced row-echelon form by Gauss-Jordan elimination, tracking the row
// transform on an identity block.
inline RrefResult rref(const MatFq& m) {
    const FieldCtx& f = m.field();
    MatFq r = m;
    MatFq t = identity_matrix(f, m.rows());
    int pivot_row = 0;
    for (int col = 0; col < m.cols() && pivot_row < m.rows(); ++col) {
        int sel = -1;
        for (int i = pivot_row; i < m.rows(); ++i)
            if (!f.is_zero(r.at(i, col))) { sel = i; break; }
        if (sel < 0) continue;
        if (sel != pivot_row)
            for (int j = 0; j < m.cols(); ++j) std::swap(r.at(sel, j), r.at(pivot_row, j));
        if (sel != pivot_row)
            for (int j = 0; j < m.rows(); ++j) std::swap(t.at(sel, j), t.at(pivot_row, j));
        const FqElem piv_inv = f.inv(r.at(pivot_row, col));
        for (int j = 0; j < m.cols(); ++j) r.at(pivot_row, j) = f.mul(piv_inv, r.at(pivot_row, j));
        for (int j = 0; j < m.rows(); ++j) t.at(pivot_row, j) = f.mul(piv_inv, t.at(pivot_row, j));
        for (int i = 0; i < m.rows(); ++i) {
            if (i == pivot_row || f.is_zero(r.at(i, col))) continue;
            const FqElem factor = r.at(i, col);
            for (int j = 0; j < m.cols(); ++j)
                r.at(i, j) = f.sub(r.at(i, j), f.mul(factor, r.at(pivot_row, j)));
            for (int j = 0; j < m.rows(); ++j)
                t.at(i, j) = f.sub(t.at(i, j), f.mul(factor, t.at(pivot_row, j)));
        }
        ++pivot_row;
    }
    return {r, pivot_row, t};
}

inline int mat_rank(const MatFq& m) { return rref(m).rank; }

inline FqElem det(const MatFq& m) {
    if (!m.is_square()) throw std::invalid_argument("determinant of non-square matrix");
    const FieldCtx& f = m.field();
    MatFq a = m;
    const int n = m.rows();
    FqElem d = f.one();
    for (int col = 0; col < n; ++col) {
        int sel = -1;
        for (int i = col; i < n; ++i)
            if (!f.is_zero(a.at(i, col))) { sel = i; break; }
        if (sel < 0) return f.zero();
        if (sel != col) {
            for (int j = 0; j < n; ++j) std::swap(a.at(sel, j), a.at(col, j));
            d = f.neg(d);
        }
        d = f.mul(d, a.at(col, col));
        const FqElem piv_inv = f.inv(a.at(col, col));
        for (int i = col + 1; i < n; ++i) {
            const FqElem factor = f.mul(a.at(i, col), piv_inv);
            if (f.is_zero(factor)) continue;
            for (int j = col; j < n; ++j)
                a.at(i, j) = f.sub(a.at(i, j), f.mul(factor, a.at(col, j)));
        }
    }
    return d;
}

inline MatFq inverse(const MatFq& m) {
    if (!m.is_square()) throw std::invalid_argument("inverse of non-square matrix");
    RrefResult r = rref(m);
    if (r.rank != m.rows()) throw std::domain_error("matrix is singular");
    return r.transform;
}

// X^{-1} A X.
inline MatFq conjugate(const MatFq& x, const MatFq& a) {
    return mat_mul(inverse(x), mat_mul(a, x));
}

inline FqElem mat_trace(const MatFq& a) {
    if (!a.is_square()) throw std::invalid_argument("trace of non-square matrix");
    const FieldCtx& f = a.field();
    FqElem t = f.zero();
    for (int i = 0; i < a.rows(); ++i) t = f.add(t, a.at(i, i));
    return t;
}

// Entrywise bilinear form sum_ij a_ij b_ij = tr(A B^T).
inline FqElem frobenius_form(const MatFq& a, const MatFq& b) {
    require_same_shape(a, b);
    const FieldCtx& f = a.field();
    FqElem t = f.zero();
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) t = f.add(t, f.mul(a.at(i, j), b.at(i, j)));
    return t;
}

// Linear subspace of F_q^n in canonical form: basis rows in reduced
// row-echelon form, so equal subspaces have equal representations.
class Subspace {
public:
    // Canonicalizes the span of the given vectors (rows may be dependent).
    static Subspace span(const FieldCtx& f, int ambient, const std::vector<VecFq>& vectors) {
        Subspace s;
        s.ambient_ = ambient;
        if (vectors.empty()) {
            s.basis_.clear();
            return s;
        }
        MatFq m(f, static_cast<int>(vectors.size()), ambient);
        for (int i = 0; i < static_cast<int>(vectors.size()); ++i) {
            if (vectors[i].size() != ambient) throw std::invalid_argument("ambient mismatch");
            for (int j = 0; j < ambient; ++j) m.at(i, j) = vectors[i].at(j);
        }
        RrefResult r = rref(m);
        for (int i = 0; i < r.rank; ++i) {
            VecFq v(f, ambient);
            for (int j = 0; j < ambient; ++j) v.at(j) = r.rref.at(i, j);
            s.basis_.push_back(v);
        }
        return s;
    }

    static Subspace zero(const FieldCtx& f, int ambient) { return span(f, ambient, {}); }

    static Subspace full(const FieldCtx& f, int ambient) {
        std::vector<VecFq> e;
        for (int i = 0; i < ambient; ++i) e.push_back(unit_vector(f, ambient, i));
        return span(f, ambient, e);
    }

    int ambient_dim() const { return ambient_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<VecFq>& basis() const { return basis_; }

    bool contains(const VecFq& v) const {
        if (v.size() != ambient_) return false;
        if (basis_.empty()) return v.is_zero();
        const FieldCtx& f = basis_[0].field();
        VecFq w = v;
        for (const VecFq& b : basis_) {
            int piv = -1;
            for (int j = 0; j < ambient_; ++j)
                if (!f.is_zero(b.at(j))) { piv = j; break; }
            const FqElem c = w.at(piv);
            if (f.is_zero(c)) continue;
            for (int j = 0; j < ambient_; ++j) w.at(j) = f.sub(w.at(j), f.mul(c, b.at(j)));
        }
        return w.is_zero();
    }

    bool contains(const Subspace& other) const {
        for (const VecFq& b : other.basis_)
            if (!contains(b)) return false;
        return true;
    }

    friend bool operator==(const Subspace&, const Subspace&) = default;

private:
    int ambient_ = 0;
    std::vector<VecFq> basis_;
};

// Right null space {v : Mv = 0} in canonical form.
inline Subspace kernel(const MatFq& m) {
    const FieldCtx& f = m.field();
    RrefResult r = rref(m);
    std::vector<int> pivot_col_of_row;
    std::vector<bool> is_pivot(m.cols(), false);
    for (int i = 0; i < r.rank; ++i) {
        int piv = -1;
        for (int j = 0; j < m.cols(); ++j)
            if (!f.is_zero(r.rref.at(i, j))) { piv = j; break; }
        pivot_col_of_row.push_back(piv);
        is_pivot[piv] = true;
    }
    std::vector<VecFq> basis;
    for (int free_col = 0; free_col < m.cols(); ++free_col) {
        if (is_pivot[free_col]) continue;
        VecFq v(f, m.cols());
        v.at(free_col) = f.one();
        for (int i = 0; i < r.rank; ++i)
            v.at(pivot_col_of_row[i]) = f.neg(r.rref.at(i, free_col));
        basis.push_back(v);
    }
    return Subspace::span(f, m.cols(), basis);
}

inline Subspace subspace_image(const MatFq& a, const Subspace& s) {
    const FieldCtx& f = a.field();
    std::vector<VecFq> mapped;
    for (const VecFq& b : s.basis()) mapped.push_back(mat_vec_mul(a, b));
    return Subspace::span(f, a.rows(), mapped);
}

inline Subspace subspace_sum(const FieldCtx& f, const Subspace& a, const Subspace& b) {
    std::vector<VecFq> all = a.basis();
    for (const VecFq& v : b.basis()) all.push_back(v);
    return Subspace::span(f, a.ambient_dim(), all);
}

// Orthogonal complement under the standard dot product.
inline Subspace subspace_perp(const FieldCtx& f, const Subspace& s) {
    if (s.dim() == 0) return Subspace::full(f, s.ambient_dim());
    MatFq m(f, s.dim(), s.ambient_dim());
    for (int i = 0; i < s.dim(); ++i)
        for (int j = 0; j < s.ambient_dim(); ++j) m.at(i, j) = s.basis()[i].at(j);
    return kernel(m);
}

inline Subspace subspace_intersection(const FieldCtx& f, const Subspace& a, const Subspace& b) {
    return subspace_perp(f, subspace_sum(f, subspace_perp(f, a), subspace_perp(f, b)));
}

inline MatFq random_matrix(const FieldCtx& f, int rows, int cols, Rng& rng) {
    MatFq m(f, rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m.at(i, j) = f.random(rng);
    return m;
}

inline VecFq random_vector(const FieldCtx& f, int n, Rng& rng) {
    VecFq v(f, n);
    for (int i = 0; i < n; ++i) v.at(i) = f.random(rng);
    return v;
}

// Uniform over GL_n(F_q) by rejection from uniform matrices.
inline MatFq random_invertible(const FieldCtx& f, int n, Rng& rng) {
    for (;;) {
        MatFq m = random_matrix(f, n, n, rng);
        if (mat_rank(m) == n) return m;
    }
}

// Invertible matrix whose last column is u. Deterministic completion: the
// other columns are the standard basis vectors in order, skipping the one
// indexed by u's first nonzero coordinate.
inline MatFq complete_to_invertible(const VecFq& u) {
    if (u.is_zero()) throw std::invalid_argument("cannot complete the zero vector");
    const FieldCtx& f = u.field();
    const int n = u.size();
    int lead = 0;
    while (f.is_zero(u.at(lead))) ++lead;
    MatFq z(f, n, n);
    int col = 0;
    for (int k = 0; k < n && col < n - 1; ++k) {
        if (k == lead) continue;
        z.at(k, col) = f.one();
        ++col;
    }
    for (int i = 0; i < n; ++i) z.at(i, n - 1) = u.at(i);
    return z;
}

// Matrix built from an odometer index: entry at row-major position k holds
// the field element with code (index / q^k) mod q.
inline MatFq matrix_from_index(const FieldCtx& f, int rows, int cols, std::uint64_t index) {
    MatFq m(f, rows, cols);
    const std::uint64_t q = f.q();
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            m.at(i, j) = f.element(index % q);
            index /= q;
        }
    return m;
}

inline std::uint64_t matrix_space_size(const FieldCtx& f, int rows, int cols) {
    std::uint64_t total = 1;
    for (int i = 0; i < rows * cols; ++i) {
        if (total > (std::uint64_t(1) << 40)) throw std::domain_error("matrix space too large to enumerate");
        total *= f.q();
    }
    return total;
}

}  // namespace hbs
