#include <catch_amalgamated.hpp>

#include <random>
#include <set>

#include "jpow/poly.hpp"

using namespace jpow;

namespace {

std::vector<ClosureElement> all_elements(const Field& F, unsigned degree) {
    std::vector<ClosureElement> out;
    std::uint64_t total = 1;
    for (unsigned i = 0; i < degree; ++i) total *= F.p();
    for (std::uint64_t n = 0; n < total; ++n) {
        std::vector<std::uint32_t> c(degree);
        std::uint64_t v = n;
        for (unsigned i = 0; i < degree; ++i) {
            c[i] = static_cast<std::uint32_t>(v % F.p());
            v /= F.p();
        }
        out.push_back(F.from_coeffs(degree, c));
    }
    return out;
}

ClosureElement random_mixed(const Field& F, std::mt19937_64& rng) {
    static const unsigned degrees[] = {1, 1, 2, 3, 4};
    return F.random(rng, degrees[rng() % 5]);
}

}  // namespace

TEST_CASE("config validation rejects bad characteristics") {
    CHECK_THROWS_AS(Field(2), ConfigError);
    CHECK_THROWS_AS(Field(9), ConfigError);
    CHECK_THROWS_AS(Field(FieldConfig{5, 0}), ConfigError);
    CHECK_THROWS_AS(Field(FieldConfig{5, 33}), ConfigError);
    CHECK_NOTHROW(Field(3));
}

TEST_CASE("prime field basics") {
    Field F3(3), F5(5);
    CHECK(F3.from_int(2) + F3.from_int(2) == F3.from_int(1));
    CHECK(F5.from_int(2).inverse() == F5.from_int(3));
    CHECK_THROWS_AS(F5.zero().inverse(), DivisionByZero);
    CHECK(F5.from_int(-1) == F5.from_int(4));
    CHECK_THROWS_AS(F3.one() + F5.one(), CharacteristicMismatch);
}

TEST_CASE("defining polynomials are irreducible by brute force") {
    Field F3(3);
    for (unsigned m : {2u, 3u, 4u}) {
        auto f = F3.defining_polynomial(m);
        REQUIRE(f.size() == m + 1);
        CHECK(f.back() == 1);
        // no roots in F_3 and, for m = 4, no monic quadratic factor
        for (std::uint32_t z = 0; z < 3; ++z) {
            std::uint32_t v = 0;
            for (std::size_t i = f.size(); i-- > 0;) v = (v * z + f[i]) % 3;
            CHECK(v != 0);
        }
    }
}

TEST_CASE("generator of F_9 has multiplicative order 8") {
    Field F(3);
    auto g = F.generator(2);
    CHECK(g.degree() == 2);
    ClosureElement acc = F.one();
    int order = 0;
    do {
        acc = acc * g;
        ++order;
    } while (!acc.is_one());
    CHECK(order == 8);
    CHECK((g * g.pow(7)).is_one());
}

TEST_CASE("embedding F_9 into F_81 keeps the minimal polynomial") {
    Field F(3);
    const auto& T = F.tower();
    auto a = F.generator(2) + F.one();
    REQUIRE(a.degree() == 2);
    auto lifted = a.lifted(4);
    auto A4 = T.arith(4);
    // brute-force the monic quadratic killing the lifted element
    int found = 0;
    std::pair<std::uint32_t, std::uint32_t> poly4{}, poly2{};
    auto A2 = T.arith(2);
    for (std::uint32_t b = 0; b < 3; ++b)
        for (std::uint32_t c = 0; c < 3; ++c) {
            auto v4 = A4.add(A4.add(A4.mul(lifted, lifted), A4.scale(lifted, b)), A4.constant(c));
            if (A4.is_zero(v4)) {
                ++found;
                poly4 = {b, c};
            }
            auto raw = a.raw();
            auto v2 = A2.add(A2.add(A2.mul(raw, raw), A2.scale(raw, b)), A2.constant(c));
            if (A2.is_zero(v2)) poly2 = {b, c};
        }
    CHECK(found == 1);
    CHECK(poly4 == poly2);
    CHECK(embed(F.zero(), 4).is_zero());
    CHECK(embed(F.one(), 4).is_one());
    CHECK_THROWS_AS(F.generator(2).embed(26), TowerLimitExceeded);
}

TEST_CASE("embeddings compose along divisor chains") {
    for (std::uint32_t p : {3u, 5u}) {
        Field F(p);
        const auto& T = F.tower();
        std::mt19937_64 rng(17 + p);
        const unsigned chains[][3] = {{1, 2, 4}, {2, 4, 8}, {1, 3, 6}, {2, 6, 12}, {3, 6, 12}, {2, 4, 12}, {3, 12, 24}};
        for (auto& ch : chains) {
            auto A = T.arith(ch[0]);
            for (int t = 0; t < 20; ++t) {
                auto x = A.random(rng);
                auto direct = T.embed(x, ch[0], ch[2]);
                auto composed = T.embed(T.embed(x, ch[0], ch[1]), ch[1], ch[2]);
                CHECK(direct == composed);
            }
        }
    }
}

TEST_CASE("embeddings are ring homomorphisms") {
    Field F(5);
    const auto& T = F.tower();
    std::mt19937_64 rng(3);
    auto A2 = T.arith(2), A6 = T.arith(6);
    for (int t = 0; t < 50; ++t) {
        auto x = A2.random(rng), y = A2.random(rng);
        CHECK(T.embed(A2.mul(x, y), 2, 6) == A6.mul(T.embed(x, 2, 6), T.embed(y, 2, 6)));
        CHECK(T.embed(A2.add(x, y), 2, 6) == A6.add(T.embed(x, 2, 6), T.embed(y, 2, 6)));
    }
}

TEST_CASE("field axioms on random triples") {
    for (std::uint32_t p : {3u, 5u, 7u}) {
        Field F(p);
        std::mt19937_64 rng(1000 + p);
        for (int t = 0; t < 10000; ++t) {
            auto a = random_mixed(F, rng), b = random_mixed(F, rng), c = random_mixed(F, rng);
            REQUIRE((a + b) + c == a + (b + c));
            REQUIRE((a * b) * c == a * (b * c));
            REQUIRE(a * (b + c) == a * b + a * c);
            REQUIRE(a * b == b * a);
            REQUIRE(a + (-a) == F.zero());
            if (!a.is_zero()) REQUIRE((a * a.inverse()).is_one());
        }
    }
}

TEST_CASE("normalization is minimal and idempotent") {
    Field F(3);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 500; ++t) {
        auto a = F.random(rng, 4);
        // idempotence: rebuilding from normalized coordinates changes nothing
        auto again = F.from_coeffs(a.degree(), std::vector<std::uint32_t>(a.coeffs().begin(), a.coeffs().end()));
        REQUIRE(again == a);
        // minimality: a^(p^d) = a exactly for d = degree, and for no smaller d
        REQUIRE(a.pow(static_cast<std::int64_t>(std::pow(3, a.degree()))) == a);
        for (unsigned d = 1; d < a.degree(); ++d) REQUIRE(a.frobenius(d) != a);
    }
    // x in F_81 squared and back: an F_9 element computed inside F_81 drops to degree 2
    auto g4 = F.generator(4);
    auto h = g4.pow(10);  // order 80/gcd(80,10) = 8 divides 9-1
    CHECK(h.degree() == 2);
}

TEST_CASE("frobenius") {
    Field F(3);
    auto a = F.generator(2);
    CHECK(frobenius(a, 0) == a);
    CHECK(frobenius(F.from_int(2), 1) == F.from_int(2));
    CHECK(frobenius(frobenius(a, 1), 1) == a);
    CHECK(frobenius(a, 1) == a.pow(3));
    CHECK(frobenius(a, 1) != a);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        auto x = random_mixed(F, rng), y = random_mixed(F, rng);
        for (unsigned e = 0; e < 4; ++e) {
            REQUIRE(frobenius(x * y, e) == frobenius(x, e) * frobenius(y, e));
            REQUIRE(frobenius(x + y, e) == frobenius(x, e) + frobenius(y, e));
        }
    }
}

TEST_CASE("kth roots match brute force") {
    Field F5(5), F3(3);
    auto r = kth_roots(F5.from_int(4), 2);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == F5.from_int(2));
    CHECK(r[1] == F5.from_int(3));
    CHECK(kth_roots(F5.zero(), 3) == std::vector<ClosureElement>{F5.zero()});

    // fourth roots of unity over F_3, by brute force over F_9
    std::set<ClosureElement> brute;
    for (const auto& z : all_elements(F3, 2))
        if ((z * z * z * z).is_one()) brute.insert(z);
    auto u = roots_of_unity(F3, 4);
    CHECK(std::set<ClosureElement>(u.begin(), u.end()) == brute);
    CHECK(brute.size() == 4);
    int in_prime = 0;
    for (const auto& z : u) in_prime += z.in_prime_field();
    CHECK(in_prime == 2);

    CHECK(roots_of_unity(F3, 1) == std::vector<ClosureElement>{F3.one()});
    auto u52 = roots_of_unity(F5, 2);
    CHECK(u52 == std::vector<ClosureElement>{F5.one(), F5.from_int(4)});
    CHECK(roots_of_unity(F3, 3) == std::vector<ClosureElement>{F3.one()});
    CHECK(roots_of_unity(F3, 6).size() == 2);
}

TEST_CASE("kth roots property") {
    for (std::uint32_t p : {3u, 5u}) {
        Field F(p);
        std::mt19937_64 rng(99 + p);
        for (int t = 0; t < 100; ++t) {
            auto a = F.random_nonzero(rng, 1 + rng() % 2);
            unsigned k = 1 + rng() % 5;
            auto roots = kth_roots(a, k);
            auto unity = roots_of_unity(F, k);
            REQUIRE(roots.size() == unity.size());
            for (auto& z : roots) REQUIRE(z.pow(k) == a);
        }
    }
}

TEST_CASE("poly_roots reconstructs the polynomial") {
    Field F3(3), F5(5);
    CHECK(poly_roots({F5.from_int(3), F5.one()}) == std::vector<ClosureElement>{F5.from_int(2)});
    CHECK(poly_roots({F5.from_int(-4), F5.zero(), F5.one()}) ==
          std::vector<ClosureElement>{F5.from_int(2), F5.from_int(3)});
    CHECK(poly_roots({F3.one(), F3.from_int(-2), F3.one()}) == std::vector<ClosureElement>{F3.one(), F3.one()});
    CHECK_THROWS(poly_roots({F3.zero()}));

    for (std::uint32_t p : {3u, 5u}) {
        Field F(p);
        std::mt19937_64 rng(7 * p);
        for (int t = 0; t < 60; ++t) {
            unsigned deg = 1 + rng() % 5;
            ClosurePoly f;
            for (unsigned i = 0; i < deg; ++i) f.push_back(F.random(rng, 1 + rng() % 2));
            auto lead = F.random_nonzero(rng, 1);
            f.push_back(lead);
            std::vector<ClosureElement> roots;
            try {
                roots = poly_roots(f);
            } catch (const TowerLimitExceeded&) {
                continue;
            }
            REQUIRE(roots.size() == deg);
            ClosurePoly prod{lead};
            for (auto& r : roots) {
                ClosurePoly next(prod.size() + 1, F.zero());
                for (std::size_t i = 0; i < prod.size(); ++i) {
                    next[i + 1] += prod[i];
                    next[i] -= prod[i] * r;
                }
                prod = next;
            }
            REQUIRE(prod == f);
        }
    }
}

TEST_CASE("p-th power polynomials and repeated roots") {
    Field F(3);
    // (z^3 - a)(z - 1)^2 for a of degree 2
    auto a = F.generator(2);
    ClosurePoly f{-a, F.zero(), F.zero(), F.one()};
    auto roots = poly_roots(f);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == roots[1]);
    CHECK(roots[1] == roots[2]);
    CHECK(roots[0].pow(3) == a);
}

TEST_CASE("tower limit is enforced by root finding") {
    // z^3 - z - 1 is irreducible over F_3, so its roots need degree 3
    Field small(FieldConfig{3, 2});
    ClosurePoly f{small.from_int(-1), small.from_int(-1), small.zero(), small.one()};
    CHECK_THROWS_AS(poly_roots(f), TowerLimitExceeded);
    Field F(3);
    ClosurePoly g{F.from_int(-1), F.from_int(-1), F.zero(), F.one()};
    auto roots = poly_roots(g);
    REQUIRE(roots.size() == 3);
    for (auto& r : roots) CHECK(r.degree() == 3);
}
