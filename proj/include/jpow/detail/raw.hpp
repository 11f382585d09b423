#pragma once

// Low-level arithmetic used to build and operate the finite-field tower:
// residues mod p, polynomials over F_p, and a single level F_{p^m} = F_p[x]/(f_m)
// with raw coefficient vectors. Nothing here normalizes to minimal subfields.

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "jpow/error.hpp"

namespace jpow::detail {

inline constexpr unsigned kMaxDegree = 32;
using Coeffs = std::array<std::uint32_t, kMaxDegree>;

inline std::uint32_t add_mod(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
    std::uint64_t s = std::uint64_t{a} + b;
    return static_cast<std::uint32_t>(s >= p ? s - p : s);
}
inline std::uint32_t sub_mod(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
    return a >= b ? a - b : static_cast<std::uint32_t>(std::uint64_t{a} + p - b);
}
inline std::uint32_t mul_mod(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
    return static_cast<std::uint32_t>(std::uint64_t{a} * b % p);
}
inline std::uint32_t pow_mod(std::uint32_t a, std::uint64_t e, std::uint32_t p) {
    std::uint32_t r = 1 % p;
    while (e) {
        if (e & 1) r = mul_mod(r, a, p);
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    return r;
}
inline std::uint32_t inv_mod(std::uint32_t a, std::uint32_t p) {
    if (a % p == 0) throw DivisionByZero();
    return pow_mod(a, p - 2, p);
}
inline std::uint32_t reduce_signed(std::int64_t v, std::uint32_t p) {
    std::int64_t r = v % static_cast<std::int64_t>(p);
    if (r < 0) r += p;
    return static_cast<std::uint32_t>(r);
}

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<unsigned> prime_divisors(unsigned n) {
    std::vector<unsigned> out;
    for (unsigned d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

inline unsigned gcd_u(unsigned a, unsigned b) {
    while (b) {
        unsigned t = a % b;
        a = b;
        b = t;
    }
    return a;
}
inline unsigned lcm_u(unsigned a, unsigned b) { return a / gcd_u(a, b) * b; }

/// Smallest primitive root modulo the prime p.
inline std::uint32_t primitive_root(std::uint32_t p) {
    if (p == 2) return 1;
    std::vector<std::uint32_t> qs;
    std::uint32_t n = p - 1;
    for (std::uint32_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            qs.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) qs.push_back(n);
    for (std::uint32_t g = 2; g < p; ++g) {
        bool ok = true;
        for (auto q : qs)
            if (pow_mod(g, (p - 1) / q, p) == 1) {
                ok = false;
                break;
            }
        if (ok) return g;
    }
    return 1;
}

// ---------------------------------------------------------------------------
// Polynomials over F_p, low-to-high coefficient vectors, always trimmed.

using FpPoly = std::vector<std::uint32_t>;

inline void trim(FpPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline FpPoly fp_rem(FpPoly a, const FpPoly& f, std::uint32_t p) {
    trim(a);
    const std::size_t n = f.size() - 1;
    const std::uint32_t lead_inv = inv_mod(f.back(), p);
    while (a.size() > n) {
        std::uint32_t c = mul_mod(a.back(), lead_inv, p);
        std::size_t shift = a.size() - 1 - n;
        for (std::size_t j = 0; j <= n; ++j) a[shift + j] = sub_mod(a[shift + j], mul_mod(c, f[j], p), p);
        trim(a);
    }
    return a;
}

inline FpPoly fp_mul(const FpPoly& a, const FpPoly& b, std::uint32_t p) {
    if (a.empty() || b.empty()) return {};
    FpPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = add_mod(r[i + j], mul_mod(a[i], b[j], p), p);
    }
    trim(r);
    return r;
}

inline FpPoly fp_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& f, std::uint32_t p) {
    return fp_rem(fp_mul(a, b, p), f, p);
}

inline FpPoly fp_powmod(FpPoly base, std::uint64_t e, const FpPoly& f, std::uint32_t p) {
    FpPoly r{1};
    base = fp_rem(base, f, p);
    while (e) {
        if (e & 1) r = fp_mulmod(r, base, f, p);
        base = fp_mulmod(base, base, f, p);
        e >>= 1;
    }
    return fp_rem(r, f, p);
}

inline FpPoly fp_gcd(FpPoly a, FpPoly b, std::uint32_t p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        FpPoly r = fp_rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        std::uint32_t li = inv_mod(a.back(), p);
        for (auto& c : a) c = mul_mod(c, li, p);
    }
    return a;
}

inline FpPoly fp_sub(FpPoly a, const FpPoly& b, std::uint32_t p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = sub_mod(a[i], b[i], p);
    trim(a);
    return a;
}

/// Rabin irreducibility test for a monic f of degree m over F_p.
inline bool fp_is_irreducible(const FpPoly& f, std::uint32_t p) {
    const unsigned m = static_cast<unsigned>(f.size() - 1);
    if (m == 1) return true;
    const FpPoly x{0, 1};
    std::vector<FpPoly> frob_powers(m + 1);
    frob_powers[0] = x;
    for (unsigned i = 1; i <= m; ++i) frob_powers[i] = fp_powmod(frob_powers[i - 1], p, f, p);
    if (fp_sub(frob_powers[m], x, p) != FpPoly{}) return false;
    for (unsigned q : prime_divisors(m)) {
        FpPoly g = fp_gcd(f, fp_sub(frob_powers[m / q], x, p), p);
        if (g.size() != 1) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// One level of the tower.

/// F_p-linear embedding F_{p^d} -> F_{p^m} sending x_d to a fixed root of f_d.
struct Embedding {
    unsigned from = 1;
    unsigned to = 1;
    std::vector<std::uint32_t> image;  // column-major m x d; column j is the image of x_d^j
    std::vector<unsigned> pivots;      // d row indices where the image is invertible
    std::vector<std::uint32_t> pull;   // row-major d x d inverse of the pivot rows
};

struct Level {
    unsigned m = 1;
    FpPoly modulus;                   // monic, degree m
    std::vector<std::uint32_t> frob;  // column-major m x m; column j is (x^j)^p
    std::array<std::unique_ptr<Embedding>, kMaxDegree + 1> from{};
};

/// Raw arithmetic in one level. Coefficients beyond m are kept at zero.
class Arith {
public:
    Arith(std::uint32_t p, const Level& level) : p_(p), level_(&level), m_(level.m) {}

    std::uint32_t p() const { return p_; }
    unsigned degree() const { return m_; }
    const Level& level() const { return *level_; }

    Coeffs zero() const { return Coeffs{}; }
    Coeffs constant(std::uint32_t c) const {
        Coeffs r{};
        r[0] = c % p_;
        return r;
    }
    Coeffs one() const { return constant(1); }

    bool is_zero(const Coeffs& a) const {
        for (unsigned i = 0; i < m_; ++i)
            if (a[i]) return false;
        return true;
    }
    bool equal(const Coeffs& a, const Coeffs& b) const {
        for (unsigned i = 0; i < m_; ++i)
            if (a[i] != b[i]) return false;
        return true;
    }

    Coeffs add(const Coeffs& a, const Coeffs& b) const {
        Coeffs r{};
        for (unsigned i = 0; i < m_; ++i) r[i] = add_mod(a[i], b[i], p_);
        return r;
    }
    Coeffs sub(const Coeffs& a, const Coeffs& b) const {
        Coeffs r{};
        for (unsigned i = 0; i < m_; ++i) r[i] = sub_mod(a[i], b[i], p_);
        return r;
    }
    Coeffs neg(const Coeffs& a) const { return sub(Coeffs{}, a); }
    Coeffs scale(const Coeffs& a, std::uint32_t c) const {
        Coeffs r{};
        for (unsigned i = 0; i < m_; ++i) r[i] = mul_mod(a[i], c, p_);
        return r;
    }

    Coeffs mul(const Coeffs& a, const Coeffs& b) const {
        if (m_ == 1) return constant(mul_mod(a[0], b[0], p_));
        std::array<std::uint64_t, 2 * kMaxDegree> t{};
        for (unsigned i = 0; i < m_; ++i) {
            if (!a[i]) continue;
            for (unsigned j = 0; j < m_; ++j) t[i + j] = (t[i + j] + std::uint64_t{a[i]} * b[j]) % p_;
        }
        const auto& f = level_->modulus;
        for (unsigned k = 2 * m_ - 2; k >= m_; --k) {
            std::uint64_t c = t[k] % p_;
            if (!c) continue;
            std::uint64_t nc = p_ - c;
            for (unsigned j = 0; j < m_; ++j) t[k - m_ + j] = (t[k - m_ + j] + nc * f[j]) % p_;
        }
        Coeffs r{};
        for (unsigned i = 0; i < m_; ++i) r[i] = static_cast<std::uint32_t>(t[i] % p_);
        return r;
    }

    Coeffs pow(Coeffs a, std::uint64_t e) const {
        Coeffs r = one();
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }

    /// Inverse via the extended Euclidean algorithm on F_p[x].
    Coeffs inv(const Coeffs& a) const {
        if (is_zero(a)) throw DivisionByZero();
        if (m_ == 1) return constant(inv_mod(a[0], p_));
        FpPoly r0 = level_->modulus;
        FpPoly r1(a.begin(), a.begin() + m_);
        trim(r1);
        FpPoly s0{}, s1{1};
        while (r1.size() > 1) {
            // r0 = q*r1 + rem
            FpPoly q, rem = r0;
            const std::uint32_t li = inv_mod(r1.back(), p_);
            while (rem.size() >= r1.size()) {
                std::uint32_t c = mul_mod(rem.back(), li, p_);
                std::size_t shift = rem.size() - r1.size();
                if (q.size() <= shift) q.resize(shift + 1, 0);
                q[shift] = c;
                for (std::size_t j = 0; j < r1.size(); ++j)
                    rem[shift + j] = sub_mod(rem[shift + j], mul_mod(c, r1[j], p_), p_);
                trim(rem);
            }
            FpPoly s2 = fp_sub(s0, fp_mul(q, s1, p_), p_);
            r0 = std::move(r1);
            r1 = std::move(rem);
            s0 = std::move(s1);
            s1 = std::move(s2);
        }
        // r1 is a nonzero constant
        const std::uint32_t ci = inv_mod(r1[0], p_);
        Coeffs out{};
        FpPoly s = fp_rem(s1, level_->modulus, p_);
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = mul_mod(s[i], ci, p_);
        return out;
    }

    Coeffs frob(const Coeffs& a) const {
        if (m_ == 1) return a;
        Coeffs r{};
        const auto& F = level_->frob;
        for (unsigned j = 0; j < m_; ++j) {
            if (!a[j]) continue;
            for (unsigned i = 0; i < m_; ++i) r[i] = add_mod(r[i], mul_mod(F[j * m_ + i], a[j], p_), p_);
        }
        return r;
    }
    Coeffs frob_pow(Coeffs a, unsigned e) const {
        e %= m_;
        for (unsigned i = 0; i < e; ++i) a = frob(a);
        return a;
    }

    template <class Rng>
    Coeffs random(Rng& rng) const {
        std::uniform_int_distribution<std::uint32_t> dist(0, p_ - 1);
        Coeffs r{};
        for (unsigned i = 0; i < m_; ++i) r[i] = dist(rng);
        return r;
    }

private:
    std::uint32_t p_;
    const Level* level_;
    unsigned m_;
};

// ---------------------------------------------------------------------------
// Polynomials over one level, low-to-high, trimmed.

using RawPoly = std::vector<Coeffs>;

inline void trim(const Arith& F, RawPoly& a) {
    while (!a.empty() && F.is_zero(a.back())) a.pop_back();
}

inline RawPoly make_monic(const Arith& F, RawPoly a) {
    trim(F, a);
    if (a.empty()) return a;
    Coeffs li = F.inv(a.back());
    for (auto& c : a) c = F.mul(c, li);
    return a;
}

inline RawPoly poly_mul(const Arith& F, const RawPoly& a, const RawPoly& b) {
    if (a.empty() || b.empty()) return {};
    RawPoly r(a.size() + b.size() - 1, F.zero());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (F.is_zero(a[i])) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
    }
    trim(F, r);
    return r;
}

inline RawPoly poly_sub(const Arith& F, RawPoly a, const RawPoly& b) {
    if (a.size() < b.size()) a.resize(b.size(), F.zero());
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = F.sub(a[i], b[i]);
    trim(F, a);
    return a;
}

/// Returns (quotient, remainder).
inline std::pair<RawPoly, RawPoly> poly_divmod(const Arith& F, RawPoly a, const RawPoly& b) {
    trim(F, a);
    RawPoly q;
    if (b.empty()) throw DivisionByZero();
    const Coeffs li = F.inv(b.back());
    const std::size_t n = b.size() - 1;
    if (a.size() > n) q.assign(a.size() - n, F.zero());
    while (a.size() > n) {
        Coeffs c = F.mul(a.back(), li);
        std::size_t shift = a.size() - 1 - n;
        q[shift] = c;
        for (std::size_t j = 0; j <= n; ++j) a[shift + j] = F.sub(a[shift + j], F.mul(c, b[j]));
        trim(F, a);
    }
    trim(F, q);
    return {q, a};
}

inline RawPoly poly_rem(const Arith& F, RawPoly a, const RawPoly& b) { return poly_divmod(F, std::move(a), b).second; }

inline RawPoly poly_mulmod(const Arith& F, const RawPoly& a, const RawPoly& b, const RawPoly& f) {
    return poly_rem(F, poly_mul(F, a, b), f);
}

inline RawPoly poly_powmod(const Arith& F, RawPoly base, std::uint64_t e, const RawPoly& f) {
    RawPoly r{F.one()};
    base = poly_rem(F, base, f);
    while (e) {
        if (e & 1) r = poly_mulmod(F, r, base, f);
        base = poly_mulmod(F, base, base, f);
        e >>= 1;
    }
    return poly_rem(F, r, f);
}

inline RawPoly poly_gcd(const Arith& F, RawPoly a, RawPoly b) {
    trim(F, a);
    trim(F, b);
    while (!b.empty()) {
        RawPoly r = poly_rem(F, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return make_monic(F, std::move(a));
}

inline RawPoly poly_derivative(const Arith& F, const RawPoly& a) {
    RawPoly d;
    for (std::size_t i = 1; i < a.size(); ++i)
        d.push_back(F.scale(a[i], static_cast<std::uint32_t>(i % F.p())));
    trim(F, d);
    return d;
}

/// Computes h^(p^m) mod f for the level's own q = p^m (the q-power map).
inline RawPoly poly_qpow(const Arith& F, RawPoly h, const RawPoly& f) {
    for (unsigned i = 0; i < F.degree(); ++i) h = poly_powmod(F, h, F.p(), f);
    return h;
}

/// Squarefree part of a nonzero polynomial (monic).
inline RawPoly poly_radical(const Arith& F, RawPoly g) {
    g = make_monic(F, std::move(g));
    if (g.size() <= 2) return g;
    RawPoly d = poly_derivative(F, g);
    if (d.empty()) {
        // g(x) = h(x^p): take p-th roots of the coefficients
        RawPoly h;
        for (std::size_t i = 0; i < g.size(); i += F.p()) h.push_back(F.frob_pow(g[i], F.degree() - 1));
        return poly_radical(F, std::move(h));
    }
    RawPoly c = poly_gcd(F, g, d);
    RawPoly w = poly_divmod(F, g, c).first;
    w = make_monic(F, w);
    // strip the factors of w out of c; what remains is a p-th power
    for (;;) {
        RawPoly y = poly_gcd(F, c, w);
        if (y.size() <= 1) break;
        c = poly_divmod(F, c, y).first;
    }
    c = make_monic(F, c);
    if (c.size() <= 1) return w;
    RawPoly h;
    for (std::size_t i = 0; i < c.size(); i += F.p()) h.push_back(F.frob_pow(c[i], F.degree() - 1));
    return make_monic(F, poly_mul(F, w, poly_radical(F, std::move(h))));
}

/// Degrees (over the level) of the irreducible factors of a squarefree polynomial.
inline std::vector<unsigned> distinct_degrees(const Arith& F, RawPoly r) {
    std::vector<unsigned> out;
    r = make_monic(F, std::move(r));
    RawPoly x{F.zero(), F.one()};
    RawPoly h = x;
    for (unsigned j = 1; r.size() > 1; ++j) {
        if (2 * j > r.size() - 1) {
            out.push_back(static_cast<unsigned>(r.size() - 1));
            break;
        }
        h = poly_qpow(F, poly_rem(F, h, r), r);
        RawPoly g = poly_gcd(F, r, poly_sub(F, h, x));
        if (g.size() > 1) {
            out.push_back(j);
            r = poly_divmod(F, r, g).first;
            h = poly_rem(F, h, r);
        }
    }
    return out;
}

/// All roots of a monic squarefree polynomial that splits into linear factors
/// over the level (equal-degree splitting with random shifts).
template <class Rng>
void split_linear(const Arith& F, RawPoly r, std::vector<Coeffs>& out, Rng& rng) {
    r = make_monic(F, std::move(r));
    if (r.size() <= 1) return;
    if (r.size() == 2) {
        out.push_back(F.neg(r[0]));
        return;
    }
    const std::uint32_t p = F.p();
    for (;;) {
        RawPoly base{F.random(rng), F.one()};
        RawPoly g = poly_powmod(F, base, (p - 1) / 2, r);
        RawPoly w = g, cur = g;
        for (unsigned i = 1; i < F.degree(); ++i) {
            cur = poly_powmod(F, cur, p, r);
            w = poly_mulmod(F, w, cur, r);
        }
        w = poly_sub(F, w, RawPoly{F.one()});
        RawPoly d = poly_gcd(F, r, w);
        if (d.size() > 1 && d.size() < r.size()) {
            RawPoly e = poly_divmod(F, r, d).first;
            split_linear(F, std::move(d), out, rng);
            split_linear(F, std::move(e), out, rng);
            return;
        }
    }
}

inline bool coeffs_less(const Coeffs& a, const Coeffs& b, unsigned m) {
    return std::lexicographical_compare(a.begin(), a.begin() + m, b.begin(), b.begin() + m);
}

}  // namespace jpow::detail
