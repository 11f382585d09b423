#pragma once

// Characteristic polynomial, exact Jordan canonical form, diagonalizability and
// k-th roots of diagonalizable matrices.

#include <algorithm>
#include <map>
#include <vector>

#include "jpow/matrix.hpp"
#include "jpow/poly.hpp"

namespace jpow {

struct JordanBlock {
    ClosureElement eigenvalue;
    std::size_t size = 1;
    friend bool operator==(const JordanBlock& a, const JordanBlock& b) {
        return a.eigenvalue == b.eigenvalue && a.size == b.size;
    }
};

/// X = S J S^{-1}; blocks sorted by eigenvalue, then by size descending.
struct JordanDecomposition {
    ExactMatrix S;
    ExactMatrix S_inv;
    std::vector<JordanBlock> blocks;

    ExactMatrix J() const {
        const Field& F = S.field();
        ExactMatrix r(F, S.n());
        std::size_t off = 0;
        for (const auto& b : blocks) {
            for (std::size_t i = 0; i < b.size; ++i) {
                r(off + i, off + i) = b.eigenvalue;
                if (i + 1 < b.size) r(off + i, off + i + 1) = F.one();
            }
            off += b.size;
        }
        return r;
    }
    ExactMatrix reassemble() const { return S * J() * S_inv; }
};

/// Jordan block J_r(lambda).
inline ExactMatrix jordan_block(const Field& F, std::size_t r, const ClosureElement& lambda) {
    ExactMatrix J = ExactMatrix::scalar(F, r, lambda);
    for (std::size_t i = 0; i + 1 < r; ++i) J(i, i + 1) = F.one();
    return J;
}

/// det(zI - X), low-to-high, via reduction to upper Hessenberg form.
inline ClosurePoly charpoly(const ExactMatrix& X) {
    const std::size_t n = X.n();
    const Field& F = X.field();
    ExactMatrix H = X;
    for (std::size_t m = 0; m + 2 < n; ++m) {
        std::size_t piv = m + 1;
        while (piv < n && H(piv, m).is_zero()) ++piv;
        if (piv == n) continue;
        if (piv != m + 1) {
            for (std::size_t j = 0; j < n; ++j) std::swap(H(piv, j), H(m + 1, j));
            for (std::size_t i = 0; i < n; ++i) std::swap(H(i, piv), H(i, m + 1));
        }
        const ClosureElement inv = H(m + 1, m).inverse();
        for (std::size_t i = m + 2; i < n; ++i) {
            if (H(i, m).is_zero()) continue;
            const ClosureElement u = H(i, m) * inv;
            for (std::size_t j = 0; j < n; ++j) H(i, j) -= u * H(m + 1, j);
            for (std::size_t r = 0; r < n; ++r) H(r, m + 1) += u * H(r, i);
        }
    }
    // p_0 = 1; p_m = (z - h_mm) p_{m-1} - sum_{i<m} h_im (prod_{j=i+1..m} h_{j,j-1}) p_{i-1}
    std::vector<ClosurePoly> P(n + 1);
    P[0] = {F.one()};
    auto add_scaled = [&](ClosurePoly& acc, const ClosurePoly& q, const ClosureElement& c) {
        if (acc.size() < q.size()) acc.resize(q.size(), F.zero());
        for (std::size_t i = 0; i < q.size(); ++i) acc[i] += c * q[i];
    };
    for (std::size_t m = 1; m <= n; ++m) {
        ClosurePoly next(m + 1, F.zero());
        for (std::size_t i = 0; i < P[m - 1].size(); ++i) {
            next[i + 1] += P[m - 1][i];
            next[i] -= H(m - 1, m - 1) * P[m - 1][i];
        }
        ClosureElement prod = F.one();
        for (std::size_t i = m - 1; i >= 1; --i) {
            prod = prod * H(i, i - 1);
            if (prod.is_zero()) break;
            add_scaled(next, P[i - 1], -(H(i - 1, m - 1) * prod));
        }
        P[m] = std::move(next);
    }
    return P[n];
}

/// Eigenvalues with algebraic multiplicity, sorted.
inline std::vector<ClosureElement> eigenvalues(const ExactMatrix& X) { return poly_roots(charpoly(X)); }

namespace detail {

/// Echelon basis for incremental independence tests.
class IncrementalBasis {
public:
    /// Adds v when independent of the current span; returns whether it was added.
    bool add(const Vector& v) {
        Vector w = reduce(v);
        std::size_t piv = 0;
        while (piv < w.size() && w[piv].is_zero()) ++piv;
        if (piv == w.size()) return false;
        const ClosureElement inv = w[piv].inverse();
        for (auto& x : w) x = x * inv;
        rows_.push_back(std::move(w));
        pivots_.push_back(piv);
        return true;
    }
    std::size_t size() const { return rows_.size(); }

private:
    Vector reduce(Vector v) const {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const ClosureElement c = v[pivots_[r]];
            if (c.is_zero()) continue;
            for (std::size_t j = 0; j < v.size(); ++j)
                if (!rows_[r][j].is_zero()) v[j] -= c * rows_[r][j];
        }
        return v;
    }
    std::vector<Vector> rows_;
    std::vector<std::size_t> pivots_;
};

}  // namespace detail

inline JordanDecomposition jordan_form(const ExactMatrix& X) {
    const std::size_t n = X.n();
    const Field& F = X.field();
    auto eig = eigenvalues(X);
    std::vector<std::pair<ClosureElement, std::size_t>> distinct;
    for (const auto& e : eig) {
        if (!distinct.empty() && distinct.back().first == e)
            ++distinct.back().second;
        else
            distinct.push_back({e, 1});
    }

    JordanDecomposition out;
    std::vector<Vector> columns;
    for (const auto& [lambda, alg] : distinct) {
        const ExactMatrix N = X - ExactMatrix::scalar(F, n, lambda);
        // kernels of N^j until the generalized eigenspace is reached
        std::vector<std::vector<Vector>> K{{}};
        ExactMatrix Nj = ExactMatrix::identity(F, n);
        while (K.back().size() < alg) {
            Nj = Nj * N;
            K.push_back(nullspace(Nj));
        }
        const std::size_t q = K.size() - 1;
        struct Chain {
            Vector top;
            std::size_t len;
        };
        std::vector<Chain> chains;
        for (std::size_t j = q; j >= 1; --j) {
            detail::IncrementalBasis span;
            for (const auto& v : K[j - 1]) span.add(v);
            for (const auto& c : chains) {
                Vector v = c.top;
                for (std::size_t t = 0; t < c.len - j; ++t) v = N.apply(v);
                span.add(v);
            }
            for (const auto& v : K[j])
                if (span.add(v)) chains.push_back({v, j});
        }
        // chains were found longest first; keep that order within the eigenvalue
        for (const auto& c : chains) {
            std::vector<Vector> cols(c.len);
            Vector v = c.top;
            for (std::size_t i = c.len; i-- > 0;) {
                cols[i] = v;
                v = N.apply(v);
            }
            for (auto& col : cols) columns.push_back(std::move(col));
            out.blocks.push_back({lambda, c.len});
        }
    }
    out.S = ExactMatrix::from_columns(F, columns);
    out.S_inv = inverse(out.S);
    return out;
}

/// True when the geometric multiplicities add up to n.
inline bool is_diagonalizable(const ExactMatrix& X) {
    auto eig = eigenvalues(X);
    eig.erase(std::unique(eig.begin(), eig.end()), eig.end());
    std::size_t total = 0;
    for (const auto& e : eig) total += X.n() - rank(X - ExactMatrix::scalar(X.field(), X.n(), e));
    return total == X.n();
}

/// Y with Y^k = X for diagonalizable X; each eigenvalue gets its least k-th root.
inline ExactMatrix diag_kth_root(const ExactMatrix& X, unsigned k) {
    auto jd = jordan_form(X);
    Vector d;
    for (const auto& b : jd.blocks) {
        if (b.size != 1) throw NotDiagonalizable();
        d.push_back(min_kth_root(b.eigenvalue, k));
    }
    return jd.S * ExactMatrix::diag(X.field(), d) * jd.S_inv;
}

}  // namespace jpow
