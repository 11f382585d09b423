#pragma once

// Root finding over the closure: polynomials with ClosureElement coefficients,
// k-th roots and roots of unity.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "jpow/field.hpp"

namespace jpow {

/// Polynomial with closure coefficients, low-to-high.
using ClosurePoly = std::vector<ClosureElement>;

/// All roots of f with multiplicity, sorted by the element order.
inline std::vector<ClosureElement> poly_roots(ClosurePoly f) {
    while (!f.empty() && f.back().is_zero()) f.pop_back();
    if (f.empty()) throw Error("poly_roots: zero polynomial");
    const detail::Tower& T = f.back().tower();
    if (f.size() == 1) return {};

    unsigned D = 1;
    for (const auto& c : f) D = detail::lcm_u(D, c.degree());
    T.check(D);
    detail::Arith FD = T.arith(D);
    detail::RawPoly raw;
    for (const auto& c : f) raw.push_back(c.lifted(D));

    detail::RawPoly rad = detail::poly_radical(FD, raw);
    unsigned s = 1;
    for (unsigned d : detail::distinct_degrees(FD, rad)) s = detail::lcm_u(s, d);
    const unsigned top = D * s;
    T.check(top);

    detail::Arith FT = T.arith(top);
    detail::RawPoly radT, fullT;
    for (const auto& c : rad) radT.push_back(T.embed(c, D, top));
    for (const auto& c : raw) fullT.push_back(T.embed(c, D, top));

    std::mt19937_64 rng(0x5EEDF00DULL ^ (std::uint64_t{top} << 32) ^ rad.size());
    std::vector<detail::Coeffs> roots;
    detail::split_linear(FT, radT, roots, rng);

    std::vector<ClosureElement> out;
    for (const auto& r : roots) {
        // multiplicity by repeated division
        detail::RawPoly g = fullT;
        detail::RawPoly lin{FT.neg(r), FT.one()};
        unsigned mult = 0;
        for (;;) {
            auto [q, rem] = detail::poly_divmod(FT, g, lin);
            if (!rem.empty()) break;
            ++mult;
            g = std::move(q);
        }
        ClosureElement e(T, top, r);
        for (unsigned i = 0; i < mult; ++i) out.push_back(e);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Every z with z^k = a, each once, sorted.
inline std::vector<ClosureElement> kth_roots(const ClosureElement& a, unsigned k) {
    if (k == 0) throw Error("kth_roots: k must be positive");
    if (a.is_zero()) return {a};
    ClosurePoly f(k + 1, a - a);
    f[0] = -a;
    f[k] = a.pow(0);
    auto roots = poly_roots(std::move(f));
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

/// The k-th roots of unity (the p-part of k contributes nothing).
inline std::vector<ClosureElement> roots_of_unity(const Field& F, unsigned k) { return kth_roots(F.one(), k); }

/// Least k-th root of a in the element order.
inline ClosureElement min_kth_root(const ClosureElement& a, unsigned k) { return kth_roots(a, k).front(); }

}  // namespace jpow
