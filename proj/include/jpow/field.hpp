#pragma once

// Exact arithmetic in the algebraic closure of F_p, realized as a lazily built
// tower of finite fields F_{p^m} = F_p[x]/(f_m) with compatible embeddings.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "jpow/detail/raw.hpp"
#include "jpow/error.hpp"

namespace jpow {

inline constexpr unsigned kDefaultTowerLimit = 24;
inline constexpr unsigned kMaxTowerLimit = detail::kMaxDegree;

struct FieldConfig {
    std::uint32_t p = 5;
    unsigned tower_limit = kDefaultTowerLimit;

    void validate() const {
        if (p == 2) throw ConfigError("characteristic 2 is not supported");
        if (p < 3 || !detail::is_prime(p)) throw ConfigError("p must be an odd prime, got " + std::to_string(p));
        if (p >= (1u << 31)) throw ConfigError("p must be below 2^31");
        if (tower_limit < 1 || tower_limit > kMaxTowerLimit)
            throw ConfigError("tower_limit must lie in [1, " + std::to_string(kMaxTowerLimit) + "]");
    }
};

namespace detail {

/// Levels of F_p-bar for one prime, shared by every Tower with that p.
/// Append-only; readers never lock.
class LevelStore {
public:
    explicit LevelStore(std::uint32_t p) : p_(p) {
        for (auto& slot : levels_) slot.store(nullptr, std::memory_order_relaxed);
    }

    std::uint32_t p() const { return p_; }

    const Level& level(unsigned m) const {
        const Level* l = levels_[m].load(std::memory_order_acquire);
        if (l) return *l;
        std::lock_guard<std::recursive_mutex> lock(mutex_);
        return install(m);
    }

    static const LevelStore& get(std::uint32_t p) {
        static std::mutex reg_mutex;
        static std::map<std::uint32_t, std::unique_ptr<LevelStore>> registry;
        std::lock_guard<std::mutex> lock(reg_mutex);
        auto& slot = registry[p];
        if (!slot) slot = std::make_unique<LevelStore>(p);
        return *slot;
    }

private:
    static FpPoly digits_poly(std::uint64_t n, unsigned m, std::uint32_t p) {
        FpPoly f(m + 1, 0);
        for (unsigned i = 0; i < m; ++i) {
            f[i] = static_cast<std::uint32_t>(n % p);
            n /= p;
        }
        f[m] = 1;
        return f;
    }

    FpPoly find_modulus(unsigned m) const {
        if (m == 1) return FpPoly{0, 1};
        for (std::uint64_t n = 1;; ++n) {
            FpPoly f = digits_poly(n, m, p_);
            if (f[0] == 0) continue;
            if (fp_is_irreducible(f, p_)) return f;
        }
    }

    // Solves for d coordinates given an m x d column-major image of rank d.
    static void set_pullback(Embedding& e, std::uint32_t p) {
        const unsigned m = e.to, d = e.from;
        // row-reduce the transpose (d x m) to pick d independent rows of the image
        std::vector<std::vector<std::uint32_t>> rows(m, std::vector<std::uint32_t>(d));
        for (unsigned i = 0; i < m; ++i)
            for (unsigned j = 0; j < d; ++j) rows[i][j] = e.image[j * m + i];
        std::vector<std::vector<std::uint32_t>> reduced;
        std::vector<unsigned> pivot_cols;
        e.pivots.clear();
        for (unsigned i = 0; i < m && e.pivots.size() < d; ++i) {
            auto v = rows[i];
            for (std::size_t t = 0; t < reduced.size(); ++t) {
                std::uint32_t c = v[pivot_cols[t]];
                if (!c) continue;
                for (unsigned j = 0; j < d; ++j) v[j] = sub_mod(v[j], mul_mod(c, reduced[t][j], p), p);
            }
            unsigned pc = d;
            for (unsigned j = 0; j < d; ++j)
                if (v[j]) {
                    pc = j;
                    break;
                }
            if (pc == d) continue;
            std::uint32_t inv = inv_mod(v[pc], p);
            for (auto& x : v) x = mul_mod(x, inv, p);
            for (std::size_t t = 0; t < reduced.size(); ++t) {
                std::uint32_t c = reduced[t][pc];
                if (!c) continue;
                for (unsigned j = 0; j < d; ++j) reduced[t][j] = sub_mod(reduced[t][j], mul_mod(c, v[j], p), p);
            }
            reduced.push_back(v);
            pivot_cols.push_back(pc);
            e.pivots.push_back(i);
        }
        // invert the d x d submatrix on the pivot rows: Gauss-Jordan on [A | I]
        std::vector<std::vector<std::uint32_t>> a(d, std::vector<std::uint32_t>(2 * d, 0));
        for (unsigned r = 0; r < d; ++r) {
            for (unsigned j = 0; j < d; ++j) a[r][j] = rows[e.pivots[r]][j];
            a[r][d + r] = 1;
        }
        for (unsigned c = 0; c < d; ++c) {
            unsigned piv = c;
            while (a[piv][c] == 0) ++piv;
            std::swap(a[piv], a[c]);
            std::uint32_t inv = inv_mod(a[c][c], p);
            for (auto& x : a[c]) x = mul_mod(x, inv, p);
            for (unsigned r = 0; r < d; ++r) {
                if (r == c || !a[r][c]) continue;
                std::uint32_t f = a[r][c];
                for (unsigned j = 0; j < 2 * d; ++j) a[r][j] = sub_mod(a[r][j], mul_mod(f, a[c][j], p), p);
            }
        }
        e.pull.assign(d * d, 0);
        for (unsigned r = 0; r < d; ++r)
            for (unsigned j = 0; j < d; ++j) e.pull[r * d + j] = a[r][d + j];
    }

    const Level& install(unsigned m) const {
        if (const Level* l = levels_[m].load(std::memory_order_acquire)) return *l;
        for (unsigned d = 1; d < m; ++d)
            if (m % d == 0) install(d);

        auto lvl = std::make_unique<Level>();
        lvl->m = m;
        lvl->modulus = find_modulus(m);
        lvl->frob.assign(m * m, 0);
        {
            FpPoly xp = fp_powmod(FpPoly{0, 1}, p_, lvl->modulus, p_);
            FpPoly col{1};
            for (unsigned j = 0; j < m; ++j) {
                for (std::size_t i = 0; i < col.size(); ++i) lvl->frob[j * m + i] = col[i];
                col = fp_mulmod(col, xp, lvl->modulus, p_);
            }
        }
        Arith F(p_, *lvl);
        std::mt19937_64 rng(0x9E3779B97F4A7C15ULL ^ (std::uint64_t{p_} << 8) ^ m);

        for (unsigned d = 2; d < m; ++d) {
            if (m % d) continue;
            const Level& sub = *levels_[d].load(std::memory_order_acquire);
            RawPoly f;
            for (auto c : sub.modulus) f.push_back(F.constant(c));
            std::vector<Coeffs> roots;
            split_linear(F, f, roots, rng);
            std::sort(roots.begin(), roots.end(), [m](const Coeffs& a, const Coeffs& b) { return coeffs_less(a, b, m); });

            const Embedding* chosen = nullptr;
            auto emb = std::make_unique<Embedding>();
            for (const auto& r : roots) {
                emb->from = d;
                emb->to = m;
                emb->image.assign(m * d, 0);
                Coeffs pw = F.one();
                for (unsigned j = 0; j < d; ++j) {
                    for (unsigned i = 0; i < m; ++i) emb->image[j * m + i] = pw[i];
                    pw = F.mul(pw, r);
                }
                bool ok = true;
                for (unsigned e = 2; e < d && ok; ++e) {
                    if (d % e) continue;
                    const Embedding& ed = *sub.from[e];
                    const Embedding& em = *lvl->from[e];
                    // image of x_e through d, then through the candidate
                    for (unsigned i = 0; i < m && ok; ++i) {
                        std::uint32_t s = 0;
                        for (unsigned j = 0; j < d; ++j) s = add_mod(s, mul_mod(emb->image[j * m + i], ed.image[1 * d + j], p_), p_);
                        if (s != em.image[1 * m + i]) ok = false;
                    }
                }
                if (ok) {
                    chosen = emb.get();
                    break;
                }
            }
            if (!chosen) throw Error("internal: no compatible embedding for degree " + std::to_string(d));
            set_pullback(*emb, p_);
            lvl->from[d] = std::move(emb);
        }

        const Level* raw = lvl.get();
        storage_.push_back(std::move(lvl));
        levels_[m].store(raw, std::memory_order_release);
        return *raw;
    }

    std::uint32_t p_;
    mutable std::recursive_mutex mutex_;
    mutable std::array<std::atomic<const Level*>, kMaxDegree + 1> levels_;
    mutable std::vector<std::unique_ptr<Level>> storage_;
};

/// A view of the closure bounded by a tower limit.
class Tower {
public:
    Tower(std::uint32_t p, unsigned limit) : store_(&LevelStore::get(p)), p_(p), limit_(limit) {}

    std::uint32_t p() const { return p_; }
    unsigned limit() const { return limit_; }
    const LevelStore& store() const { return *store_; }

    void check(unsigned m) const {
        if (m > limit_) throw TowerLimitExceeded(m, limit_);
    }
    const Level& level(unsigned m) const {
        check(m);
        return store_->level(m);
    }
    Arith arith(unsigned m) const { return Arith(p_, level(m)); }

    /// Embeds coordinates of F_{p^d} into F_{p^m}; d must divide m.
    Coeffs embed(const Coeffs& a, unsigned d, unsigned m) const {
        if (d == m) return a;
        if (m % d) throw Error("internal: embedding degree does not divide target");
        if (d == 1) {
            Coeffs r{};
            r[0] = a[0];
            return r;
        }
        const Embedding& e = *level(m).from[d];
        Coeffs r{};
        for (unsigned j = 0; j < d; ++j) {
            if (!a[j]) continue;
            for (unsigned i = 0; i < m; ++i) r[i] = add_mod(r[i], mul_mod(e.image[j * m + i], a[j], p_), p_);
        }
        return r;
    }

    /// Finds the minimal subfield containing a and returns its coordinates there.
    std::pair<unsigned, Coeffs> normalize(const Coeffs& a, unsigned m) const {
        if (m == 1) return {1, a};
        bool constant = true;
        for (unsigned i = 1; i < m; ++i)
            if (a[i]) {
                constant = false;
                break;
            }
        if (constant) {
            Coeffs r{};
            r[0] = a[0];
            return {1, r};
        }
        Arith F = arith(m);
        Coeffs cur = F.frob(a);
        unsigned d = 1;
        while (!F.equal(cur, a)) {
            cur = F.frob(cur);
            ++d;
        }
        if (d == m) return {m, a};
        const Embedding& e = *level(m).from[d];
        Coeffs r{};
        for (unsigned row = 0; row < d; ++row) {
            std::uint32_t s = 0;
            for (unsigned j = 0; j < d; ++j) s = add_mod(s, mul_mod(e.pull[row * d + j], a[e.pivots[j]], p_), p_);
            r[row] = s;
        }
        return {d, r};
    }

    static const Tower& get(std::uint32_t p, unsigned limit) {
        static std::mutex reg_mutex;
        static std::map<std::pair<std::uint32_t, unsigned>, std::unique_ptr<Tower>> registry;
        std::lock_guard<std::mutex> lock(reg_mutex);
        auto& slot = registry[{p, limit}];
        if (!slot) slot = std::make_unique<Tower>(p, limit);
        return *slot;
    }

private:
    const LevelStore* store_;
    std::uint32_t p_;
    unsigned limit_;
};

}  // namespace detail

/// An element of the algebraic closure of F_p, stored in its minimal subfield.
class ClosureElement {
public:
    ClosureElement() = default;
    ClosureElement(const detail::Tower& tower, unsigned degree, const detail::Coeffs& coeffs)
        : tower_(&tower) {
        auto [d, c] = tower.normalize(coeffs, degree);
        degree_ = d;
        c_ = c;
    }

    bool bound() const { return tower_ != nullptr; }
    const detail::Tower& tower() const {
        if (!tower_) throw Error("element is not bound to a field");
        return *tower_;
    }
    std::uint32_t p() const { return tower().p(); }
    unsigned degree() const { return degree_; }
    std::span<const std::uint32_t> coeffs() const { return {c_.data(), degree_}; }
    const detail::Coeffs& raw() const { return c_; }

    bool is_zero() const { return degree_ == 1 && c_[0] == 0; }
    bool is_one() const { return degree_ == 1 && c_[0] == 1; }
    /// True when the element lies in the prime subfield; value() is then its residue.
    bool in_prime_field() const { return degree_ == 1; }
    std::uint32_t value() const { return c_[0]; }

    /// Coordinates of this element inside F_{p^m}; degree() must divide m.
    detail::Coeffs lifted(unsigned m) const { return tower().embed(c_, degree_, m); }

    /// Image in F_{p^m} as a (possibly non-normalized-degree) element; equal to *this.
    ClosureElement embed(unsigned m) const {
        if (m % degree_) throw Error("target degree must be a multiple of the element degree");
        tower().check(m);
        return *this;
    }

    friend ClosureElement operator+(const ClosureElement& a, const ClosureElement& b) {
        return combine(a, b, [](const detail::Arith& F, const detail::Coeffs& x, const detail::Coeffs& y) {
            return F.add(x, y);
        });
    }
    friend ClosureElement operator-(const ClosureElement& a, const ClosureElement& b) {
        return combine(a, b, [](const detail::Arith& F, const detail::Coeffs& x, const detail::Coeffs& y) {
            return F.sub(x, y);
        });
    }
    friend ClosureElement operator*(const ClosureElement& a, const ClosureElement& b) {
        return combine(a, b, [](const detail::Arith& F, const detail::Coeffs& x, const detail::Coeffs& y) {
            return F.mul(x, y);
        });
    }
    friend ClosureElement operator/(const ClosureElement& a, const ClosureElement& b) { return a * b.inverse(); }
    ClosureElement operator-() const {
        ClosureElement r = *this;
        const auto p = tower().p();
        for (unsigned i = 0; i < degree_; ++i) r.c_[i] = detail::sub_mod(0, c_[i], p);
        return r;
    }
    ClosureElement& operator+=(const ClosureElement& b) { return *this = *this + b; }
    ClosureElement& operator-=(const ClosureElement& b) { return *this = *this - b; }
    ClosureElement& operator*=(const ClosureElement& b) { return *this = *this * b; }

    ClosureElement inverse() const {
        if (is_zero()) throw DivisionByZero();
        ClosureElement r = *this;
        r.c_ = tower().arith(degree_).inv(c_);
        return r;
    }

    ClosureElement pow(std::int64_t e) const {
        if (e < 0) return inverse().pow(-e);
        ClosureElement r = *this;
        if (e == 0) {
            r.degree_ = 1;
            r.c_ = detail::Coeffs{};
            r.c_[0] = 1;
            return r;
        }
        if (is_zero()) return *this;
        auto [d, c] = tower().normalize(tower().arith(degree_).pow(c_, static_cast<std::uint64_t>(e)), degree_);
        r.degree_ = d;
        r.c_ = c;
        return r;
    }

    /// a^(p^e).
    ClosureElement frobenius(unsigned e) const {
        ClosureElement r = *this;
        r.c_ = tower().arith(degree_).frob_pow(c_, e);
        return r;
    }

    friend bool operator==(const ClosureElement& a, const ClosureElement& b) {
        if (a.degree_ != b.degree_) return false;
        if (a.tower_ && b.tower_ && a.tower_->p() != b.tower_->p()) return false;
        for (unsigned i = 0; i < a.degree_; ++i)
            if (a.c_[i] != b.c_[i]) return false;
        return true;
    }
    friend bool operator!=(const ClosureElement& a, const ClosureElement& b) { return !(a == b); }
    /// Total order: degree first, then coefficients lexicographically from c_0.
    friend bool operator<(const ClosureElement& a, const ClosureElement& b) {
        if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
        return detail::coeffs_less(a.c_, b.c_, a.degree_);
    }

    std::size_t hash() const {
        std::size_t h = degree_;
        for (unsigned i = 0; i < degree_; ++i) h = h * 1000003u ^ c_[i];
        return h;
    }

    std::string to_string() const {
        if (degree_ == 1) return std::to_string(c_[0]);
        std::string s = "[" + std::to_string(degree_) + ":";
        for (unsigned i = 0; i < degree_; ++i) s += (i ? "," : "") + std::to_string(c_[i]);
        return s + "]";
    }

private:
    static const detail::Tower& common(const ClosureElement& a, const ClosureElement& b) {
        if (!a.tower_ || !b.tower_) throw Error("element is not bound to a field");
        if (a.tower_->p() != b.tower_->p())
            throw CharacteristicMismatch("characteristics " + std::to_string(a.tower_->p()) + " and " +
                                         std::to_string(b.tower_->p()) + " differ");
        return a.tower_->limit() >= b.tower_->limit() ? *a.tower_ : *b.tower_;
    }

    template <class Op>
    static ClosureElement combine(const ClosureElement& a, const ClosureElement& b, Op op) {
        const detail::Tower& T = common(a, b);
        ClosureElement r;
        r.tower_ = &T;
        if (a.degree_ == 1 && b.degree_ == 1) {
            detail::Arith F = T.arith(1);
            r.c_ = op(F, a.c_, b.c_);
            return r;
        }
        const unsigned L = detail::lcm_u(a.degree_, b.degree_);
        T.check(L);
        detail::Arith F = T.arith(L);
        auto x = T.embed(a.c_, a.degree_, L);
        auto y = T.embed(b.c_, b.degree_, L);
        auto [d, c] = T.normalize(op(F, x, y), L);
        r.degree_ = d;
        r.c_ = c;
        return r;
    }

    const detail::Tower* tower_ = nullptr;
    unsigned degree_ = 1;
    detail::Coeffs c_{};
};

/// Handle to the closure of F_p under a given tower limit.
class Field {
public:
    explicit Field(FieldConfig cfg = {}) : cfg_(cfg) {
        cfg_.validate();
        tower_ = &detail::Tower::get(cfg_.p, cfg_.tower_limit);
    }
    explicit Field(std::uint32_t p, unsigned tower_limit = kDefaultTowerLimit)
        : Field(FieldConfig{p, tower_limit}) {}

    std::uint32_t p() const { return cfg_.p; }
    unsigned tower_limit() const { return cfg_.tower_limit; }
    const FieldConfig& config() const { return cfg_; }
    const detail::Tower& tower() const { return *tower_; }

    ClosureElement zero() const { return from_int(0); }
    ClosureElement one() const { return from_int(1); }
    ClosureElement from_int(std::int64_t v) const {
        detail::Coeffs c{};
        c[0] = detail::reduce_signed(v, cfg_.p);
        return ClosureElement(*tower_, 1, c);
    }
    /// Element of F_{p^degree} with the given coordinates (normalized on return).
    ClosureElement from_coeffs(unsigned degree, std::span<const std::uint32_t> coeffs) const {
        if (degree < 1 || degree > detail::kMaxDegree) throw ParseError("element degree out of range");
        tower_->check(degree);
        if (coeffs.size() != degree) throw ParseError("coefficient count does not match degree");
        detail::Coeffs c{};
        for (unsigned i = 0; i < degree; ++i) {
            if (coeffs[i] >= cfg_.p) throw ParseError("coefficient not reduced mod p");
            c[i] = coeffs[i];
        }
        return ClosureElement(*tower_, degree, c);
    }

    /// Multiplicative generator of F_{p^degree}: the least primitive element in
    /// the element order. When p^degree - 1 is too large to factor by trial
    /// division (above 2^40) the class of x is returned, which still generates
    /// the field over F_p.
    ClosureElement generator(unsigned degree) const {
        tower_->check(degree);
        if (degree == 1) return from_int(detail::primitive_root(cfg_.p));
        detail::Coeffs xc{};
        xc[1] = 1;
        const ClosureElement x(*tower_, degree, xc);
        long double size = std::pow(static_cast<long double>(cfg_.p), degree);
        if (size > static_cast<long double>(1ULL << 40)) return x;
        std::uint64_t order = 1;
        for (unsigned i = 0; i < degree; ++i) order *= cfg_.p;
        --order;
        std::vector<std::uint64_t> qs;
        {
            std::uint64_t n = order;
            for (std::uint64_t q = 2; q * q <= n; ++q)
                if (n % q == 0) {
                    qs.push_back(q);
                    while (n % q == 0) n /= q;
                }
            if (n > 1) qs.push_back(n);
        }
        // enumerate degree-`degree` elements in the element order
        std::vector<std::uint32_t> c(degree, 0);
        for (;;) {
            std::size_t i = 0;
            while (i < degree && ++c[degree - 1 - i] == cfg_.p) c[degree - 1 - i++] = 0;
            if (i == degree) return x;
            auto g = from_coeffs(degree, c);
            if (g.degree() != degree) continue;
            bool primitive = true;
            for (auto q : qs)
                if (g.pow(static_cast<std::int64_t>(order / q)).is_one()) {
                    primitive = false;
                    break;
                }
            if (primitive) return g;
        }
    }

    /// Defining polynomial f_m of F_{p^m}, monic, low-to-high.
    std::vector<std::uint32_t> defining_polynomial(unsigned degree) const { return tower_->level(degree).modulus; }

    /// Uniform element of F_{p^degree} (may land in a proper subfield).
    template <class Rng>
    ClosureElement random(Rng& rng, unsigned degree = 1) const {
        detail::Arith F = tower_->arith(degree);
        return ClosureElement(*tower_, degree, F.random(rng));
    }

    template <class Rng>
    ClosureElement random_nonzero(Rng& rng, unsigned degree = 1) const {
        for (;;) {
            auto a = random(rng, degree);
            if (!a.is_zero()) return a;
        }
    }

    friend bool operator==(const Field& a, const Field& b) { return a.tower_ == b.tower_; }

private:
    FieldConfig cfg_;
    const detail::Tower* tower_ = nullptr;
};

inline ClosureElement frobenius(const ClosureElement& a, unsigned e) { return a.frobenius(e); }

/// Embedding into F_{p^m}: elements are stored normalized, so this only checks
/// the degree constraint and the tower limit.
inline ClosureElement embed(const ClosureElement& a, unsigned m) { return a.embed(m); }

}  // namespace jpow

template <>
struct std::hash<jpow::ClosureElement> {
    std::size_t operator()(const jpow::ClosureElement& a) const noexcept { return a.hash(); }
};
