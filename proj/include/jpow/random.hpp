#pragma once

// Seeded generators for matrices and field elements.

#include <cstdint>
#include <random>

#include "jpow/matrix.hpp"

namespace jpow {

using Rng = std::mt19937_64;

/// Entries drawn uniformly from F_{p^degree}.
inline ExactMatrix random_matrix(const Field& F, std::size_t n, Rng& rng, unsigned degree = 1) {
    ExactMatrix r(F, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(i, j) = F.random(rng, degree);
    return r;
}

inline ExactMatrix random_nonzero_matrix(const Field& F, std::size_t n, Rng& rng, unsigned degree = 1) {
    for (;;) {
        auto r = random_matrix(F, n, rng, degree);
        if (!r.is_zero()) return r;
    }
}

inline ExactMatrix random_invertible(const Field& F, std::size_t n, Rng& rng, unsigned degree = 1) {
    for (;;) {
        auto r = random_matrix(F, n, rng, degree);
        if (is_invertible(r)) return r;
    }
}

/// Uniform index in [0, n).
inline std::size_t random_index(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

}  // namespace jpow
