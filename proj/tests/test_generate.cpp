#include <catch_amalgamated.hpp>

#include "jpow/generate.hpp"
#include "jpow/potent.hpp"

using namespace jpow;

namespace {

// Applies every +1 single-entry mutation to every matrix of the witness and
// counts how many of them still replay.
std::size_t surviving_mutations(const SimplicityWitness& w, const ExactMatrix& seed, unsigned k) {
    std::size_t survivors = 0;
    const std::size_t n = seed.n();
    for (std::size_t s = 0; s < w.steps.size(); ++s)
        for (int which = 0; which < 4; ++which)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    SimplicityWitness t = w;
                    ExactMatrix& M = which == 0   ? t.steps[s].p
                                     : which == 1 ? t.steps[s].q
                                     : which == 2 ? t.steps[s].power
                                                  : t.steps[s].result;
                    M(i, j) += M.field().one();
                    if (replay(t, seed, k)) ++survivors;
                }
    return survivors;
}

}  // namespace

TEST_CASE("auxiliary matrices of the block construction") {
    for (std::uint32_t p : {3u, 5u, 7u}) {
        Field F(p);
        for (std::size_t r = 2; r <= 8; ++r) {
            auto A = detail::aux_A(F, r), B = detail::aux_B(F, r), C = detail::aux_C(F, r), D = detail::aux_D(F, r);
            CHECK(B * B == B);
            CHECK(D * D == D);
            CHECK(jordan_product(A, B) == jordan_block(F, r, F.zero()));
            CHECK(jordan_product(C, D) == jordan_block(F, r, F.one()));
            for (unsigned k : {1u, 2u, 3u}) CHECK(mixed_product(B, A, k) == jordan_block(F, r, F.zero()));
            auto ja = jordan_form(A).blocks;
            REQUIRE(ja.size() == 2);
            CHECK(ja[0] == JordanBlock{F.zero(), r - 1});
            CHECK(ja[1] == JordanBlock{F.from_int(2), 1});
            auto jc = jordan_form(C).blocks;
            if (r == 2) {
                REQUIRE(jc.size() == 1);
                CHECK(jc[0] == JordanBlock{F.zero(), 2});
            } else {
                REQUIRE(jc.size() == 2);
                CHECK(jc[0] == JordanBlock{F.zero(), 2});
                CHECK(jc[1] == JordanBlock{F.one(), r - 2});
            }
        }
    }
}

TEST_CASE("two-by-two nilpotent block from A_2 and B_2") {
    for (std::uint32_t p : {3u, 5u}) {
        Field F(p);
        auto A2 = F.from_int(2) * ExactMatrix::unit(F, 2, 0, 0);
        auto B2 = ExactMatrix::from_ints(F, {{0, 1}, {0, 1}});
        CHECK(detail::aux_A(F, 2) == A2);
        CHECK(detail::aux_B(F, 2) == B2);
        CHECK(jordan_product(A2, B2) == ExactMatrix::unit(F, 2, 0, 1));
        for (unsigned k = 1; k <= 4; ++k) CHECK(mixed_product(B2, A2, k) == ExactMatrix::unit(F, 2, 0, 1));
    }
}

TEST_CASE("eval semantics") {
    Field F(5);
    CHECK(eval(GenerationCertificate::leaf(ExactMatrix::zero(F, 2)), 3).is_zero());
    auto mu = F.from_int(2);
    CHECK(eval(GenerationCertificate::leaf(ExactMatrix::diag(F, {mu, F.zero()})), 2) ==
          ExactMatrix::diag(F, {F.from_int(4), F.zero()}));
    auto A = ExactMatrix::from_ints(F, {{1, 2}, {3, 4}});
    auto c = GenerationCertificate::node(GenerationCertificate::leaf(ExactMatrix::identity(F, 2)),
                                         GenerationCertificate::leaf(A));
    CHECK(eval(c, 3) == A.pow(3));
    CHECK(c->depth() == 1);
    CHECK_THROWS_AS(GenerationCertificate::node(GenerationCertificate::leaf(A),
                                                GenerationCertificate::leaf(ExactMatrix::identity(F, 3))),
                    DimensionMismatch);
}

TEST_CASE("certify the identity gives a single leaf") {
    Field F(3);
    auto c = certify(ExactMatrix::identity(F, 3), 2);
    REQUIRE(c->is_leaf());
    CHECK(c->base().is_identity());
}

TEST_CASE("certify is sound on exhaustive M_2(F_3)") {
    Field F(3);
    for (unsigned k = 1; k <= 4; ++k)
        for_each_prime_matrix(F, 2, kDefaultEnumerationBudget, [&](const ExactMatrix& X) {
            auto c = certify(X, k);
            REQUIRE(eval(c, k) == X);
            REQUIRE(c->depth() <= kDefaultDepthBudget);
        });
}

TEST_CASE("certify is sound on random matrices") {
    for (std::uint32_t p : {3u, 5u})
        for (std::size_t n : {3u, 4u})
            for (unsigned k = 1; k <= 4; ++k) {
                Field F(p);
                Rng rng(1000 * p + 10 * n + k);
                for (int t = 0; t < 6; ++t) {
                    auto X = random_matrix(F, n, rng);
                    auto c = certify(X, k);
                    REQUIRE(eval(c, k) == X);
                }
            }
}

TEST_CASE("certify handles nontrivial Jordan blocks and extension eigenvalues") {
    Field F(5);
    Rng rng(77);
    for (std::size_t r = 2; r <= 5; ++r)
        for (int lam : {0, 1, 2, 3})
            for (unsigned k : {2u, 3u}) {
                auto J = jordan_block(F, r, F.from_int(lam));
                REQUIRE(eval(certify(J, k), k) == J);
            }
    auto g = F.generator(2);
    auto X = block_diag(jordan_block(F, 2, g), jordan_block(F, 1, g * g));
    auto S = random_invertible(F, 3, rng);
    X = S * X * inverse(S);
    CHECK(eval(certify(X, 3), 3) == X);
}

TEST_CASE("certify stays inside the tower when nested roots would leave it") {
    // over F_3 a 16th root of an order-8 element of F_9 needs degree 32
    Field F(3);
    ClosureElement g = F.generator(2);
    auto X = block_diag(jordan_block(F, 2, g), jordan_block(F, 2, g.frobenius(1)));
    auto c = certify(X, 4);
    CHECK(eval(c, 4) == X);
    for (unsigned k : {2u, 3u}) CHECK(eval(certify(X, k), k) == X);
}

TEST_CASE("witness examples replay") {
    Field F5(5);
    auto E12 = ExactMatrix::unit(F5, 2, 0, 1);
    auto w = simplicity_witness(E12, 2);
    CHECK(replay(w, E12, 2));
    // passes through E_11 and ends at I_2
    CHECK(w.steps.back().result.is_identity());
    CHECK(std::any_of(w.steps.begin(), w.steps.end(), [](const WitnessStep& s) {
        return s.result == ExactMatrix::unit(s.result.field(), 2, 0, 0);
    }));

    auto D = ExactMatrix::diag(F5, {F5.zero(), F5.from_int(3)});
    auto wd = simplicity_witness(D, 2);
    REQUIRE(!wd.steps.empty());
    CHECK(wd.steps.front().result == D);
    CHECK(wd.steps.front().q == D);
    CHECK(replay(wd, D, 2));

    auto I = ExactMatrix::identity(F5, 3);
    CHECK(simplicity_witness(I, 2).steps.empty());
    CHECK(replay(simplicity_witness(I, 2), I, 2));
    CHECK_THROWS_AS(simplicity_witness(ExactMatrix::zero(F5, 2), 2), ZeroSeed);
}

TEST_CASE("replay rejects wrong seeds and edits") {
    Field F(5);
    Rng rng(8);
    auto X = random_nonzero_matrix(F, 3, rng);
    auto w = simplicity_witness(X, 2, 1);
    REQUIRE(replay(w, X, 2));
    auto r = replay(w, X + ExactMatrix::identity(F, 3), 2);
    CHECK_FALSE(r.ok);
    REQUIRE(r.failed_step.has_value());
    CHECK(*r.failed_step == 0);
    CHECK_FALSE(replay(w, X, 3));
    auto cut = w;
    cut.steps.pop_back();
    CHECK_FALSE(replay(cut, X, 2));
}

TEST_CASE("witnesses replay and detect every single-entry edit") {
    for (std::uint32_t p : {3u, 5u})
        for (std::size_t n : {2u, 3u})
            for (unsigned k : {2u, 3u}) {
                Field F(p);
                Rng rng(31 * p + 7 * n + k);
                for (int t = 0; t < 4; ++t) {
                    auto X = random_nonzero_matrix(F, n, rng);
                    if (t == 1) X = F.from_int(2) * ExactMatrix::unit(F, n, n - 1, n - 1);
                    auto w = simplicity_witness(X, k, t);
                    REQUIRE(replay(w, X, k));
                    REQUIRE(surviving_mutations(w, X, k) == 0);
                }
            }
}

TEST_CASE("witnesses for k = 1 still replay") {
    Field F(3);
    Rng rng(4);
    for (int t = 0; t < 5; ++t) {
        auto X = random_nonzero_matrix(F, 3, rng);
        auto w = simplicity_witness(X, 1);
        CHECK(replay(w, X, 1));
        CHECK(surviving_mutations(w, X, 1) == 0);
    }
}

TEST_CASE("one-dimensional witnesses") {
    Field F(5);
    ExactMatrix X(F, 1);
    X(0, 0) = F.from_int(3);
    auto w = simplicity_witness(X, 2);
    CHECK(replay(w, X, 2));
    CHECK(surviving_mutations(w, X, 2) == 0);
}
