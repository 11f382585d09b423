#pragma once

// Dense square matrices over the closure, the two Jordan products and exact
// linear algebra by row reduction. Indices are 0-based throughout.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "jpow/field.hpp"

namespace jpow {

using Vector = std::vector<ClosureElement>;

class ExactMatrix {
public:
    ExactMatrix() = default;
    ExactMatrix(const Field& F, std::size_t n) : field_(F), n_(n), a_(n * n, F.zero()) {
        if (n == 0) throw DimensionMismatch("matrix dimension must be positive");
    }

    static ExactMatrix zero(const Field& F, std::size_t n) { return ExactMatrix(F, n); }
    static ExactMatrix identity(const Field& F, std::size_t n) {
        ExactMatrix r(F, n);
        for (std::size_t i = 0; i < n; ++i) r(i, i) = F.one();
        return r;
    }
    static ExactMatrix scalar(const Field& F, std::size_t n, const ClosureElement& c) {
        ExactMatrix r(F, n);
        for (std::size_t i = 0; i < n; ++i) r(i, i) = c;
        return r;
    }
    /// Standard matrix unit E_ij (0-based).
    static ExactMatrix unit(const Field& F, std::size_t n, std::size_t i, std::size_t j) {
        ExactMatrix r(F, n);
        r(i, j) = F.one();
        return r;
    }
    static ExactMatrix diag(const Field& F, const Vector& d) {
        ExactMatrix r(F, d.size());
        for (std::size_t i = 0; i < d.size(); ++i) r(i, i) = d[i];
        return r;
    }
    static ExactMatrix from_ints(const Field& F, const std::vector<std::vector<std::int64_t>>& rows) {
        ExactMatrix r(F, rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw DimensionMismatch("matrix must be square");
            for (std::size_t j = 0; j < rows.size(); ++j) r(i, j) = F.from_int(rows[i][j]);
        }
        return r;
    }

    std::size_t n() const { return n_; }
    const Field& field() const { return field_; }
    std::uint32_t p() const { return field_.p(); }

    ClosureElement& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const ClosureElement& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    ClosureElement& at(std::size_t i, std::size_t j) {
        if (i >= n_ || j >= n_) throw DimensionMismatch("index out of range");
        return a_[i * n_ + j];
    }
    const ClosureElement& at(std::size_t i, std::size_t j) const {
        if (i >= n_ || j >= n_) throw DimensionMismatch("index out of range");
        return a_[i * n_ + j];
    }
    const std::vector<ClosureElement>& entries() const { return a_; }

    bool is_zero() const {
        for (const auto& x : a_)
            if (!x.is_zero()) return false;
        return true;
    }
    bool is_identity() const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if (i == j ? !a_[i * n_ + j].is_one() : !a_[i * n_ + j].is_zero()) return false;
        return true;
    }
    /// Largest entry degree, i.e. the smallest subfield holding every entry.
    unsigned entry_degree() const {
        unsigned d = 1;
        for (const auto& x : a_) d = detail::lcm_u(d, x.degree());
        return d;
    }

    friend bool operator==(const ExactMatrix& A, const ExactMatrix& B) {
        return A.n_ == B.n_ && A.p() == B.p() && A.a_ == B.a_;
    }
    friend bool operator!=(const ExactMatrix& A, const ExactMatrix& B) { return !(A == B); }
    /// Entrywise order, for use as a map key.
    friend bool operator<(const ExactMatrix& A, const ExactMatrix& B) {
        if (A.n_ != B.n_) return A.n_ < B.n_;
        return A.a_ < B.a_;
    }

    friend ExactMatrix operator+(const ExactMatrix& A, const ExactMatrix& B) {
        check_same(A, B);
        ExactMatrix r = A;
        for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] += B.a_[i];
        return r;
    }
    friend ExactMatrix operator-(const ExactMatrix& A, const ExactMatrix& B) {
        check_same(A, B);
        ExactMatrix r = A;
        for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] -= B.a_[i];
        return r;
    }
    ExactMatrix operator-() const {
        ExactMatrix r = *this;
        for (auto& x : r.a_) x = -x;
        return r;
    }
    friend ExactMatrix operator*(const ExactMatrix& A, const ExactMatrix& B) {
        check_same(A, B);
        const std::size_t n = A.n_;
        ExactMatrix r(A.field_, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l) {
                const auto& x = A.a_[i * n + l];
                if (x.is_zero()) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    const auto& y = B.a_[l * n + j];
                    if (!y.is_zero()) r.a_[i * n + j] += x * y;
                }
            }
        return r;
    }
    friend ExactMatrix operator*(const ClosureElement& c, const ExactMatrix& A) {
        ExactMatrix r = A;
        for (auto& x : r.a_) x = c * x;
        return r;
    }
    ExactMatrix& operator+=(const ExactMatrix& B) { return *this = *this + B; }
    ExactMatrix& operator-=(const ExactMatrix& B) { return *this = *this - B; }

    Vector apply(const Vector& v) const {
        if (v.size() != n_) throw DimensionMismatch("vector length does not match matrix");
        Vector r(n_, field_.zero());
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if (!a_[i * n_ + j].is_zero() && !v[j].is_zero()) r[i] += a_[i * n_ + j] * v[j];
        return r;
    }

    ExactMatrix pow(std::uint64_t e) const {
        ExactMatrix r = identity(field_, n_), b = *this;
        while (e) {
            if (e & 1) r = r * b;
            e >>= 1;
            if (e) b = b * b;
        }
        return r;
    }

    ExactMatrix transpose() const {
        ExactMatrix r(field_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    template <class Fn>
    ExactMatrix map(Fn fn) const {
        ExactMatrix r = *this;
        for (auto& x : r.a_) x = fn(x);
        return r;
    }

    ClosureElement trace() const {
        ClosureElement t = field_.zero();
        for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    Vector column(std::size_t j) const {
        Vector c(n_);
        for (std::size_t i = 0; i < n_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    Vector row(std::size_t i) const { return Vector(a_.begin() + i * n_, a_.begin() + (i + 1) * n_); }
    static ExactMatrix from_columns(const Field& F, const std::vector<Vector>& cols) {
        ExactMatrix r(F, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != cols.size()) throw DimensionMismatch("columns do not form a square matrix");
            for (std::size_t i = 0; i < cols.size(); ++i) r(i, j) = cols[j][i];
        }
        return r;
    }

    std::string to_string() const {
        std::string s = "[";
        for (std::size_t i = 0; i < n_; ++i) {
            s += i ? "; " : "";
            for (std::size_t j = 0; j < n_; ++j) s += (j ? " " : "") + (*this)(i, j).to_string();
        }
        return s + "]";
    }

    static void check_same(const ExactMatrix& A, const ExactMatrix& B) {
        if (A.n_ != B.n_)
            throw DimensionMismatch("dimensions " + std::to_string(A.n_) + " and " + std::to_string(B.n_) + " differ");
        if (A.p() != B.p()) throw CharacteristicMismatch("matrices over different characteristics");
    }

private:
    Field field_{};
    std::size_t n_ = 0;
    std::vector<ClosureElement> a_;
};

inline ClosureElement half(const Field& F) { return F.from_int(2).inverse(); }

/// a o b = (ab + ba) / 2.
inline ExactMatrix jordan_product(const ExactMatrix& A, const ExactMatrix& B) {
    ExactMatrix::check_same(A, B);
    return half(A.field()) * (A * B + B * A);
}

/// A^k o B = (A^k B + B A^k) / 2.
inline ExactMatrix mixed_product(const ExactMatrix& A, const ExactMatrix& B, unsigned k) {
    ExactMatrix::check_same(A, B);
    ExactMatrix Ak = A.pow(k);
    return half(A.field()) * (Ak * B + B * Ak);
}

// ---------------------------------------------------------------------------
// Row reduction on rectangular data.

namespace detail {

using Rows = std::vector<Vector>;

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(Rows& rows, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t piv = r;
        while (piv < rows.size() && rows[piv][c].is_zero()) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[r]);
        const ClosureElement inv = rows[r][c].inverse();
        for (auto& x : rows[r]) x = x * inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c].is_zero()) continue;
            const ClosureElement f = rows[i][c];
            for (std::size_t j = 0; j < rows[i].size(); ++j)
                if (!rows[r][j].is_zero()) rows[i][j] -= f * rows[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline Rows to_rows(const ExactMatrix& A) {
    Rows rows(A.n());
    for (std::size_t i = 0; i < A.n(); ++i) rows[i] = A.row(i);
    return rows;
}

}  // namespace detail

inline std::size_t rank(const ExactMatrix& X) {
    auto rows = detail::to_rows(X);
    return detail::rref(rows, X.n()).size();
}

/// Basis of {v : Xv = 0}, one vector per free column (free entry set to 1).
inline std::vector<Vector> nullspace(const ExactMatrix& X) {
    const std::size_t n = X.n();
    auto rows = detail::to_rows(X);
    auto piv = detail::rref(rows, n);
    std::vector<bool> is_pivot(n, false);
    for (auto c : piv) is_pivot[c] = true;
    std::vector<Vector> basis;
    const Field& F = X.field();
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        Vector v(n, F.zero());
        v[f] = F.one();
        for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -rows[r][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

inline ExactMatrix inverse(const ExactMatrix& X) {
    const std::size_t n = X.n();
    const Field& F = X.field();
    detail::Rows rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i] = X.row(i);
        rows[i].resize(2 * n, F.zero());
        rows[i][n + i] = F.one();
    }
    auto piv = detail::rref(rows, n);
    if (piv.size() < n) throw NotInvertible();
    ExactMatrix r(F, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(i, j) = rows[i][n + j];
    return r;
}

inline bool is_invertible(const ExactMatrix& X) { return rank(X) == X.n(); }

/// Solves the (rectangular) system M x = b. Returns a particular solution and a
/// kernel basis, or nullopt when inconsistent.
inline std::optional<std::pair<Vector, std::vector<Vector>>> solve_linear(const std::vector<Vector>& M, const Vector& b,
                                                                          std::size_t cols, const Field& F) {
    detail::Rows rows(M.size());
    for (std::size_t i = 0; i < M.size(); ++i) {
        rows[i] = M[i];
        rows[i].push_back(b[i]);
    }
    auto piv = detail::rref(rows, cols + 1);
    if (!piv.empty() && piv.back() == cols) return std::nullopt;
    Vector x(cols, F.zero());
    for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = rows[r][cols];
    std::vector<bool> is_pivot(cols, false);
    for (auto c : piv) is_pivot[c] = true;
    std::vector<Vector> kernel;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        Vector v(cols, F.zero());
        v[f] = F.one();
        for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -rows[r][f];
        kernel.push_back(std::move(v));
    }
    return std::make_pair(std::move(x), std::move(kernel));
}

/// Nonzero positions, 0-based.
inline std::set<std::pair<std::size_t, std::size_t>> support(const ExactMatrix& X) {
    std::set<std::pair<std::size_t, std::size_t>> s;
    for (std::size_t i = 0; i < X.n(); ++i)
        for (std::size_t j = 0; j < X.n(); ++j)
            if (!X(i, j).is_zero()) s.insert({i, j});
    return s;
}

/// Closure hypotheses on a set S of off-diagonal positions (0-based). For each
/// (i,j) in S: (a) (i,l) in S for all l != i; (b) (l,j) in S for all l != j;
/// (c) (j,i) in S.
inline bool support_closure_check(const std::set<std::pair<std::size_t, std::size_t>>& S, std::size_t n) {
    auto in = [&](std::size_t i, std::size_t j) { return S.count({i, j}) > 0; };
    for (auto [i, j] : S) {
        if (i == j || i >= n || j >= n) return false;
        for (std::size_t l = 0; l < n; ++l) {
            if (l != i && !in(i, l)) return false;
            if (l != j && !in(l, j)) return false;
        }
        if (!in(j, i)) return false;
    }
    return true;
}

/// Block-diagonal assembly diag(A, B).
inline ExactMatrix block_diag(const ExactMatrix& A, const ExactMatrix& B) {
    ExactMatrix::check_same(A, A);
    if (A.p() != B.p()) throw CharacteristicMismatch("matrices over different characteristics");
    const std::size_t a = A.n(), b = B.n();
    ExactMatrix r(A.field(), a + b);
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < a; ++j) r(i, j) = A(i, j);
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < b; ++j) r(a + i, a + j) = B(i, j);
    return r;
}

/// Entrywise a -> a^(p^e), optionally transposed.
inline ExactMatrix frobenius(const ExactMatrix& X, unsigned e) {
    return X.map([e](const ClosureElement& x) { return x.frobenius(e); });
}

}  // namespace jpow
