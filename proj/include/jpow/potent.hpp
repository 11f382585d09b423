#pragma once

// m-potent calculus: P^m = P, orthogonality, the order PQ = QP = P^2,
// maximality, orthogonal sums and exhaustive enumeration over the prime field.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "jpow/jordan.hpp"
#include "jpow/matrix.hpp"
#include "jpow/random.hpp"

namespace jpow {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

struct PotentContext {
    unsigned m = 2;  ///< potency exponent
    std::size_t n = 2;
    Field field{};

    void validate() const {
        if (m < 2) throw ConfigError("potency exponent must be at least 2");
        if (n < 1) throw ConfigError("dimension must be positive");
    }
};

inline bool is_potent(const ExactMatrix& P, const PotentContext& ctx) {
    if (P.n() != ctx.n) throw DimensionMismatch("matrix dimension does not match context");
    return P.pow(ctx.m) == P;
}

inline bool orthogonal(const ExactMatrix& P, const ExactMatrix& Q) { return (P * Q).is_zero() && (Q * P).is_zero(); }

namespace detail {
inline void require_potent(const ExactMatrix& P, const PotentContext& ctx, const char* which) {
    if (!is_potent(P, ctx))
        throw NotPotent(std::string(which) + " is not " + std::to_string(ctx.m) + "-potent");
}
}  // namespace detail

/// P below Q: PQ = QP = P^2.
inline bool preceq(const ExactMatrix& P, const ExactMatrix& Q, const PotentContext& ctx) {
    detail::require_potent(P, ctx, "left argument");
    detail::require_potent(Q, ctx, "right argument");
    const ExactMatrix P2 = P * P;
    return P * Q == P2 && Q * P == P2;
}

/// Equivalent form P^{m-1} Q = Q P^{m-1} = P.
inline bool preceq_alt(const ExactMatrix& P, const ExactMatrix& Q, const PotentContext& ctx) {
    detail::require_potent(P, ctx, "left argument");
    detail::require_potent(Q, ctx, "right argument");
    const ExactMatrix Pm1 = P.pow(ctx.m - 1);
    return Pm1 * Q == P && Q * Pm1 == P;
}

/// Jordan-product form P^{m-1} o Q = P.
inline bool preceq_jordan(const ExactMatrix& P, const ExactMatrix& Q, const PotentContext& ctx) {
    detail::require_potent(P, ctx, "left argument");
    detail::require_potent(Q, ctx, "right argument");
    return jordan_product(P.pow(ctx.m - 1), Q) == P;
}

/// Maximal in the order exactly when invertible.
inline bool is_maximal(const ExactMatrix& P, const PotentContext& ctx) {
    detail::require_potent(P, ctx, "argument");
    return is_invertible(P);
}

/// Sum of pairwise orthogonal m-potents.
inline ExactMatrix orthosum(const std::vector<ExactMatrix>& parts, const PotentContext& ctx) {
    ExactMatrix sum = ExactMatrix::zero(ctx.field, ctx.n);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        detail::require_potent(parts[i], ctx, ("part " + std::to_string(i)).c_str());
        for (std::size_t j = 0; j < i; ++j)
            if (!orthogonal(parts[j], parts[i])) throw NotOrthogonal(j, i);
        sum += parts[i];
    }
    return sum;
}

/// Number of matrices in M_n(F_p), or nullopt-like max when it overflows.
inline std::uint64_t prime_matrix_count(std::uint32_t p, std::size_t n) {
    long double c = std::pow(static_cast<long double>(p), static_cast<long double>(n * n));
    if (c > 1.8e19L) return UINT64_MAX;
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < n * n; ++i) r *= p;
    return r;
}

/// Calls fn on every matrix in M_n(F_p) (prime-field entries), in a fixed order.
inline void for_each_prime_matrix(const Field& F, std::size_t n, std::uint64_t budget,
                                  const std::function<void(const ExactMatrix&)>& fn) {
    const std::uint64_t total = prime_matrix_count(F.p(), n);
    if (total > budget)
        throw BudgetExceeded(std::to_string(F.p()) + "^" + std::to_string(n * n) +
                             " candidates exceed the enumeration budget of " + std::to_string(budget));
    std::vector<std::uint32_t> digits(n * n, 0);
    std::vector<ClosureElement> residues;
    for (std::uint32_t v = 0; v < F.p(); ++v) residues.push_back(F.from_int(v));
    ExactMatrix X(F, n);
    for (std::uint64_t c = 0; c < total; ++c) {
        fn(X);
        for (std::size_t i = 0; i < n * n; ++i) {
            if (++digits[i] < F.p()) {
                X(i / n, i % n) = residues[digits[i]];
                break;
            }
            digits[i] = 0;
            X(i / n, i % n) = residues[0];
        }
    }
}

/// Every m-potent in M_n(F_p), each once.
inline std::vector<ExactMatrix> enumerate_potents(const PotentContext& ctx,
                                                  std::uint64_t budget = kDefaultEnumerationBudget) {
    ctx.validate();
    std::vector<ExactMatrix> out;
    for_each_prime_matrix(ctx.field, ctx.n, budget, [&](const ExactMatrix& X) {
        if (X.pow(ctx.m) == X) out.push_back(X);
    });
    return out;
}

/// Largest r with J_r(1)^{m-1} = I, i.e. the p-part of m - 1 (1 when p does not divide it).
inline std::size_t max_unipotent_block(std::uint32_t p, unsigned m) {
    std::size_t r = 1;
    for (unsigned e = m - 1; e % p == 0; e /= p) r *= p;
    return r;
}

/// Mutually orthogonal m-potents S diag(blocks) S^{-1}: the diagonal is cut into
/// random Jordan blocks (0, or a root of unity times a unipotent block short
/// enough to stay m-potent), and each block is handed to one of `parts` outputs.
/// S has entries of the given degree.
inline std::vector<ExactMatrix> random_orthogonal_potents(const PotentContext& ctx, std::size_t parts, Rng& rng,
                                                          unsigned degree = 1) {
    ctx.validate();
    const Field& F = ctx.field;
    const std::size_t n = ctx.n;
    const auto roots = roots_of_unity(F, ctx.m - 1);
    const std::size_t rmax = max_unipotent_block(F.p(), ctx.m);
    std::vector<ExactMatrix> diag(parts, ExactMatrix::zero(F, n));
    for (std::size_t at = 0; at < n;) {
        const bool zero = random_index(rng, 3) == 0;
        const std::size_t r = zero ? 1 : 1 + random_index(rng, std::min(rmax, n - at));
        if (!zero) {
            auto B = roots[random_index(rng, roots.size())] * jordan_block(F, r, F.one());
            auto& D = diag[random_index(rng, parts)];
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j) D(at + i, at + j) = B(i, j);
        }
        at += r;
    }
    const ExactMatrix S = random_invertible(F, n, rng, degree), Si = inverse(S);
    for (auto& D : diag) D = S * D * Si;
    return diag;
}

inline ExactMatrix random_potent(const PotentContext& ctx, Rng& rng, unsigned degree = 1) {
    return random_orthogonal_potents(ctx, 1, rng, degree).front();
}

}  // namespace jpow
