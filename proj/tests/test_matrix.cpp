#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "jpow/jordan.hpp"
#include "jpow/random.hpp"

using namespace jpow;

namespace {

// Leibniz determinant, used as an oracle for the characteristic polynomial.
ClosureElement leibniz_det(const ExactMatrix& A) {
    const std::size_t n = A.n();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    ClosureElement det = A.field().zero();
    do {
        std::size_t inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
        ClosureElement term = A.field().one();
        for (std::size_t i = 0; i < n; ++i) term = term * A(i, perm[i]);
        det = inversions % 2 ? det - term : det + term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

ClosureElement eval_poly(const ClosurePoly& f, const ClosureElement& z) {
    ClosureElement v = z - z;
    for (std::size_t i = f.size(); i-- > 0;) v = v * z + f[i];
    return v;
}

}  // namespace

TEST_CASE("jordan and mixed products") {
    Field F3(3), F5(5);
    auto E = [&](const Field& F, std::size_t n, std::size_t i, std::size_t j) { return ExactMatrix::unit(F, n, i, j); };
    CHECK(jordan_product(E(F3, 2, 0, 0), E(F3, 2, 0, 1)) == F3.from_int(2) * E(F3, 2, 0, 1));
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        auto A = random_matrix(F5, 3, rng), B = random_matrix(F5, 3, rng);
        CHECK(jordan_product(ExactMatrix::identity(F5, 3), B) == B);
        CHECK(jordan_product(A, A) == A * A);
        CHECK(jordan_product(A, B) == jordan_product(B, A));
        CHECK(mixed_product(A, B, 1) == jordan_product(A, B));
        CHECK(mixed_product(ExactMatrix::identity(F5, 3), B, 3) == B);
        CHECK(mixed_product(ExactMatrix::zero(F5, 3), B, 2).is_zero());
    }
    CHECK_THROWS_AS(jordan_product(E(F5, 2, 0, 0), E(F5, 3, 0, 0)), DimensionMismatch);
    CHECK_THROWS_AS(jordan_product(E(F5, 2, 0, 0), E(F3, 2, 0, 0)), CharacteristicMismatch);
}

TEST_CASE("corner extraction gives a quarter of the symmetric pair") {
    Field F(5);
    Rng rng(2);
    const auto quarter = F.from_int(4).inverse();
    for (int t = 0; t < 30; ++t) {
        auto X = random_matrix(F, 3, rng);
        for (unsigned k : {1u, 2u, 3u})
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j) {
                    if (i == j) continue;
                    auto Eii = ExactMatrix::unit(F, 3, i, i), Ejj = ExactMatrix::unit(F, 3, j, j);
                    auto lhs = mixed_product(Ejj, mixed_product(Eii, X, k), k);
                    auto rhs = quarter * (X(i, j) * ExactMatrix::unit(F, 3, i, j) + X(j, i) * ExactMatrix::unit(F, 3, j, i));
                    REQUIRE(lhs == rhs);
                }
    }
}

TEST_CASE("rank and support") {
    Field F3(3);
    CHECK(rank(ExactMatrix::zero(F3, 3)) == 0);
    CHECK(rank(ExactMatrix::identity(F3, 4)) == 4);
    CHECK(rank(ExactMatrix::from_ints(F3, {{1, 1}, {0, 1}})) == 2);
    CHECK(rank(ExactMatrix::from_ints(F3, {{1, 2}, {2, 1}})) == 1);
    CHECK(support(ExactMatrix::zero(F3, 2)).empty());
    CHECK(support(ExactMatrix::unit(F3, 2, 0, 1)) == std::set<std::pair<std::size_t, std::size_t>>{{0, 1}});
    CHECK(support(ExactMatrix::from_ints(F3, {{1, 0}, {2, 0}})) ==
          std::set<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 0}});
}

TEST_CASE("support closure hypotheses") {
    using S = std::set<std::pair<std::size_t, std::size_t>>;
    CHECK(support_closure_check(S{}, 2));
    CHECK_FALSE(support_closure_check(S{{0, 1}}, 2));
    S full;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) full.insert({i, j});
    CHECK(support_closure_check(full, 3));
    std::vector<std::pair<std::size_t, std::size_t>> off(full.begin(), full.end());
    int passing = 0;
    for (unsigned mask = 1; mask < 64; ++mask) {
        S s;
        for (unsigned b = 0; b < 6; ++b)
            if (mask >> b & 1) s.insert(off[b]);
        if (support_closure_check(s, 3)) {
            ++passing;
            CHECK(s == full);
        }
    }
    CHECK(passing == 1);
}

TEST_CASE("inverse, nullspace and similarity invariants") {
    Field F(5);
    Rng rng(3);
    for (int t = 0; t < 40; ++t) {
        auto S = random_invertible(F, 3, rng, 1 + t % 2);
        auto Si = inverse(S);
        CHECK((S * Si).is_identity());
        auto A = random_matrix(F, 3, rng), B = random_matrix(F, 3, rng);
        CHECK(rank(S * A * Si) == rank(A));
        for (unsigned k : {1u, 2u, 3u})
            CHECK(S * mixed_product(A, B, k) * Si == mixed_product(S * A * Si, S * B * Si, k));
        for (const auto& v : nullspace(A)) {
            auto w = A.apply(v);
            CHECK(std::all_of(w.begin(), w.end(), [](const ClosureElement& x) { return x.is_zero(); }));
        }
        CHECK(nullspace(A).size() + rank(A) == 3);
    }
    CHECK_THROWS_AS(inverse(ExactMatrix::unit(F, 2, 0, 1)), NotInvertible);
}

TEST_CASE("characteristic polynomial agrees with the Leibniz determinant") {
    for (std::uint32_t p : {3u, 5u}) {
        Field F(p);
        Rng rng(p);
        for (int t = 0; t < 40; ++t) {
            std::size_t n = 1 + t % 4;
            auto X = random_matrix(F, n, rng, 1 + t % 2);
            auto cp = charpoly(X);
            REQUIRE(cp.size() == n + 1);
            for (int s = 0; s < 3; ++s) {
                auto z = F.random(rng, 2);
                auto det = leibniz_det(ExactMatrix::scalar(F, n, z) - X);
                REQUIRE(eval_poly(cp, z) == det);
            }
        }
    }
}

TEST_CASE("jordan form examples") {
    Field F3(3), F5(5);
    auto jd = jordan_form(ExactMatrix::from_ints(F3, {{1, 1}, {0, 1}}));
    REQUIRE(jd.blocks.size() == 1);
    CHECK(jd.blocks[0] == JordanBlock{F3.one(), 2});

    jd = jordan_form(ExactMatrix::from_ints(F5, {{0, 1}, {0, 0}}));
    REQUIRE(jd.blocks.size() == 1);
    CHECK(jd.blocks[0] == JordanBlock{F5.zero(), 2});

    auto D = ExactMatrix::diag(F5, {F5.from_int(3), F5.from_int(1), F5.from_int(3)});
    jd = jordan_form(D);
    REQUIRE(jd.blocks.size() == 3);
    CHECK(jd.blocks[0].eigenvalue == F5.from_int(1));
    for (const auto& b : jd.blocks) CHECK(b.size == 1);
    // S is a permutation matrix
    for (std::size_t i = 0; i < 3; ++i) {
        int ones = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK((jd.S(i, j).is_zero() || jd.S(i, j).is_one()));
            ones += jd.S(i, j).is_one();
        }
        CHECK(ones == 1);
    }
    CHECK(jd.reassemble() == D);
}

TEST_CASE("jordan form reassembles exactly") {
    for (std::uint32_t p : {3u, 5u}) {
        Field F(p);
        Rng rng(40 + p);
        for (int t = 0; t < 60; ++t) {
            std::size_t n = 2 + t % 4;
            ExactMatrix X = random_matrix(F, n, rng);
            if (t % 3 == 0) {
                // force nontrivial blocks: conjugate a block-structured matrix
                auto lam = F.random(rng);
                X = block_diag(jordan_block(F, n - 1, lam), jordan_block(F, 1, lam));
                auto S = random_invertible(F, n, rng);
                X = S * X * inverse(S);
            }
            auto jd = jordan_form(X);
            REQUIRE(jd.reassemble() == X);
            std::size_t total = 0;
            for (const auto& b : jd.blocks) total += b.size;
            REQUIRE(total == n);
        }
    }
}

TEST_CASE("diagonalizability") {
    Field F3(3), F5(5);
    CHECK_FALSE(is_diagonalizable(ExactMatrix::from_ints(F3, {{1, 1}, {0, 1}})));
    CHECK(is_diagonalizable(ExactMatrix::diag(F5, {F5.from_int(2), F5.from_int(2), F5.zero()})));
    CHECK(is_diagonalizable(ExactMatrix::from_ints(F5, {{1, 1}, {0, 0}})));  // idempotent
    CHECK(is_diagonalizable(ExactMatrix::from_ints(F3, {{0, 1}, {1, 0}})));
    CHECK_FALSE(is_diagonalizable(ExactMatrix::from_ints(F5, {{0, 1}, {0, 0}})));
}

TEST_CASE("k-th roots of diagonalizable matrices") {
    Field F3(3), F5(5);
    CHECK(diag_kth_root(ExactMatrix::identity(F5, 3), 4).is_identity());
    CHECK(diag_kth_root(ExactMatrix::diag(F5, {F5.from_int(4), F5.zero()}), 2) ==
          ExactMatrix::diag(F5, {F5.from_int(2), F5.zero()}));
    for (std::int64_t x : {1, 2}) {
        auto X = ExactMatrix::from_ints(F3, {{2, 0}, {0, -2}});
        X(1, 0) = F3.from_int(2) * F3.from_int(x).inverse();
        CHECK(is_diagonalizable(X));
        CHECK(diag_kth_root(X, 4).pow(4) == X);
    }
    CHECK_THROWS_AS(diag_kth_root(ExactMatrix::from_ints(F5, {{0, 1}, {0, 0}}), 2), NotDiagonalizable);
    Rng rng(9);
    for (int t = 0; t < 40; ++t) {
        auto S = random_invertible(F5, 3, rng);
        Vector d{F5.random(rng), F5.random(rng), F5.random(rng, 2)};
        auto X = S * ExactMatrix::diag(F5, d) * inverse(S);
        unsigned k = 1 + t % 4;
        REQUIRE(diag_kth_root(X, k).pow(k) == X);
    }
}
