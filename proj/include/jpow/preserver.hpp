#pragma once

// Maps satisfying phi(A^k o B) = phi(A)^k o phi(B): the structured forms, a
// black-box oracle wrapper, the identity verifier, the canonical-form
// recovery procedure and the checks on maps that preserve the product.

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jpow/jordan.hpp"
#include "jpow/potent.hpp"
#include "jpow/random.hpp"
#include "jpow/report.hpp"

namespace jpow {

using MatrixPair = std::pair<ExactMatrix, ExactMatrix>;

/// The oracle violates the identity; the witness (A, B) has
/// phi(A^k o B) != phi(A)^k o phi(B).
class NotPreserver : public Error {
public:
    NotPreserver(MatrixPair witness, const std::string& why)
        : Error("map is not a mixed Jordan-power preserver: " + why), witness_(std::move(witness)) {}
    const MatrixPair& witness() const noexcept { return witness_; }

private:
    MatrixPair witness_;
};

// ---------------------------------------------------------------------------
// Structured maps

struct ConstantForm {
    ExactMatrix value;
};

/// X -> epsilon T w(X) T^{-1}, or with w(X) transposed, where w raises every
/// entry to the power p^e.
struct CanonicalForm {
    ClosureElement epsilon;
    ExactMatrix T;
    unsigned e = 0;
    bool transpose = false;
};

class StructuredMap {
public:
    /// Requires value^{k+1} = value.
    static StructuredMap constant(const ExactMatrix& value, unsigned k) {
        if (k == 0) throw ConfigError("k must be positive");
        if (value.pow(k + 1) != value) throw NotPotent("constant value is not (k+1)-potent");
        StructuredMap m(value.field(), value.n(), k);
        m.form_ = ConstantForm{value};
        return m;
    }

    /// Requires epsilon^k = 1 and T invertible.
    static StructuredMap canonical(const ClosureElement& epsilon, const ExactMatrix& T, unsigned e, bool transpose,
                                   unsigned k) {
        if (k == 0) throw ConfigError("k must be positive");
        if (!epsilon.pow(k).is_one()) throw ConfigError("epsilon is not a k-th root of unity");
        StructuredMap m(T.field(), T.n(), k);
        m.T_inv_ = inverse(T);
        m.form_ = CanonicalForm{epsilon, T, e, transpose};
        return m;
    }

    const Field& field() const { return F_; }
    std::size_t n() const { return n_; }
    unsigned k() const { return k_; }
    std::uint32_t p() const { return F_.p(); }
    bool is_constant() const { return std::holds_alternative<ConstantForm>(form_); }
    const ConstantForm& as_constant() const { return std::get<ConstantForm>(form_); }
    const CanonicalForm& as_canonical() const { return std::get<CanonicalForm>(form_); }
    const ExactMatrix& T_inverse() const { return T_inv_; }

    ExactMatrix operator()(const ExactMatrix& X) const {
        if (X.n() != n_) throw DimensionMismatch("map is defined on " + std::to_string(n_) + "x" + std::to_string(n_));
        if (X.field().p() != F_.p()) throw CharacteristicMismatch("map and argument characteristics differ");
        if (is_constant()) return as_constant().value;
        const auto& c = as_canonical();
        ExactMatrix W = frobenius(X, c.e);
        if (c.transpose) W = W.transpose();
        return c.epsilon * (c.T * W * T_inv_);
    }

    std::string to_string() const {
        if (is_constant()) return "constant " + as_constant().value.to_string();
        const auto& c = as_canonical();
        return "canonical epsilon=" + c.epsilon.to_string() + " T=" + c.T.to_string() + " e=" + std::to_string(c.e) +
               (c.transpose ? " transpose" : "");
    }

private:
    StructuredMap(const Field& F, std::size_t n, unsigned k) : F_(F), n_(n), k_(k), T_inv_(F, n) {}

    Field F_;
    std::size_t n_;
    unsigned k_;
    std::variant<ConstantForm, CanonicalForm> form_;
    ExactMatrix T_inv_;
};

inline ExactMatrix apply(const StructuredMap& m, const ExactMatrix& X) { return m(X); }

/// Canonical map with epsilon drawn from the k-th roots of unity, T invertible
/// with entries of degree t_degree, e below max_e and a random transpose flag.
inline StructuredMap random_canonical_map(const Field& F, std::size_t n, unsigned k, Rng& rng, unsigned t_degree = 2,
                                          unsigned max_e = 3) {
    const auto roots = roots_of_unity(F, k);
    auto eps = roots[random_index(rng, roots.size())];
    auto T = random_invertible(F, n, rng, t_degree);
    auto e = static_cast<unsigned>(random_index(rng, max_e));
    bool tr = random_index(rng, 2) == 1;
    return StructuredMap::canonical(eps, T, e, tr, k);
}

// ---------------------------------------------------------------------------
// Oracles

/// A total map on n x n matrices of characteristic p, with a query counter.
class MapOracle {
public:
    using Fn = std::function<ExactMatrix(const ExactMatrix&)>;

    MapOracle(const Field& F, std::size_t n, Fn fn, std::string name = "oracle", bool pure = true)
        : F_(F), n_(n), fn_(std::move(fn)), name_(std::move(name)), pure_(pure),
          queries_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

    static MapOracle of(const StructuredMap& m, std::string name = "structured") {
        return MapOracle(m.field(), m.n(), [m](const ExactMatrix& X) { return m(X); }, std::move(name));
    }

    ExactMatrix operator()(const ExactMatrix& X) const {
        if (X.n() != n_) throw DimensionMismatch("oracle is defined on " + std::to_string(n_) + "x" + std::to_string(n_));
        queries_->fetch_add(1, std::memory_order_relaxed);
        ExactMatrix Y = fn_(X);
        if (Y.n() != n_) throw DimensionMismatch("oracle returned a matrix of the wrong size");
        return Y;
    }

    const Field& field() const { return F_; }
    std::size_t n() const { return n_; }
    const std::string& name() const { return name_; }
    bool pure() const { return pure_; }
    std::uint64_t query_count() const { return queries_->load(std::memory_order_relaxed); }

private:
    Field F_;
    std::size_t n_;
    Fn fn_;
    std::string name_;
    bool pure_;
    std::shared_ptr<std::atomic<std::uint64_t>> queries_;
};

// ---------------------------------------------------------------------------
// Probes and verification

/// Probe families: 0, I, every E_ij, every E_ii + g E_ij (i != j) for the
/// multiplicative generator g of each listed subfield degree, and random
/// matrices whose entries cycle through those degrees.
struct ProbeConfig {
    std::vector<unsigned> degrees{1, 2, 3};
    std::size_t structured_random = 2;  ///< random members of the structured set
    std::size_t random_pairs = 100;     ///< further random pairs after the structured ones
    std::uint64_t seed = 0xC0FFEE;
};

inline std::vector<ExactMatrix> structured_probes(const Field& F, std::size_t n, const ProbeConfig& cfg, Rng& rng) {
    std::vector<ExactMatrix> out{ExactMatrix::zero(F, n), ExactMatrix::identity(F, n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.push_back(ExactMatrix::unit(F, n, i, j));
    for (unsigned d : cfg.degrees) {
        const auto g = F.generator(d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) out.push_back(ExactMatrix::unit(F, n, i, i) + g * ExactMatrix::unit(F, n, i, j));
    }
    for (std::size_t t = 0; t < cfg.structured_random; ++t)
        out.push_back(random_matrix(F, n, rng, cfg.degrees[t % cfg.degrees.size()]));
    return out;
}

struct VerificationReport {
    bool pass = true;
    std::uint64_t samples_checked = 0;
    std::optional<MatrixPair> witness;
    std::uint64_t query_count = 0;
};

/// phi(A^k o B) = phi(A)^k o phi(B) for one pair, recomputed through the oracle.
inline bool identity_holds(const MapOracle& f, const ExactMatrix& A, const ExactMatrix& B, unsigned k) {
    return f(mixed_product(A, B, k)) == mixed_product(f(A), f(B), k);
}

namespace detail {

/// Memoizes oracle values of probe matrices.
class OracleCache {
public:
    explicit OracleCache(const MapOracle& f) : f_(f) {}
    const ExactMatrix& operator()(const ExactMatrix& X) {
        auto key = X.to_string();
        auto it = memo_.find(key);
        if (it == memo_.end()) it = memo_.emplace(std::move(key), f_(X)).first;
        return it->second;
    }

private:
    const MapOracle& f_;
    std::map<std::string, ExactMatrix> memo_;
};

/// First pair in probes x probes (with `first` members tried as A or B before
/// the rest) that violates the identity.
inline std::optional<MatrixPair> find_violation(const MapOracle& f, unsigned k, const std::vector<ExactMatrix>& probes,
                                                std::uint64_t* checked = nullptr,
                                                const std::vector<ExactMatrix>& first = {}) {
    OracleCache phi(f);
    auto test = [&](const ExactMatrix& A, const ExactMatrix& B) -> bool {
        if (checked) ++*checked;
        return phi(mixed_product(A, B, k)) == mixed_product(phi(A), phi(B), k);
    };
    for (const auto& X : first)
        for (const auto& Y : probes) {
            if (!test(X, Y)) return MatrixPair{X, Y};
            if (!test(Y, X)) return MatrixPair{Y, X};
        }
    for (const auto& A : probes)
        for (const auto& B : probes)
            if (!test(A, B)) return MatrixPair{A, B};
    return std::nullopt;
}

}  // namespace detail

/// Checks the identity on all pairs of structured probes, then on random pairs;
/// a failure carries the first violating pair.
inline VerificationReport verify_identity(const MapOracle& f, unsigned k, const ProbeConfig& cfg = {}) {
    const Field& F = f.field();
    const std::size_t n = f.n();
    const std::uint64_t before = f.query_count();
    Rng rng(cfg.seed);
    VerificationReport rep;
    auto probes = structured_probes(F, n, cfg, rng);
    if (auto w = detail::find_violation(f, k, probes, &rep.samples_checked)) {
        rep.pass = false;
        rep.witness = std::move(w);
    }
    for (std::size_t t = 0; rep.pass && t < cfg.random_pairs; ++t) {
        const unsigned d = cfg.degrees[t % cfg.degrees.size()];
        auto A = random_matrix(F, n, rng, d), B = random_matrix(F, n, rng, d);
        ++rep.samples_checked;
        if (!identity_holds(f, A, B, k)) {
            rep.pass = false;
            rep.witness = MatrixPair{A, B};
        }
    }
    rep.query_count = f.query_count() - before;
    return rep;
}

// ---------------------------------------------------------------------------
// Extensional equality

/// Agreement on every E_ij, every E_ii + g E_ij for the generator g of each
/// probe degree, and `trials` seeded random matrices.
inline bool equivalent(const StructuredMap& m1, const StructuredMap& m2, std::size_t trials = 100,
                       const ProbeConfig& cfg = {}) {
    if (m1.n() != m2.n() || m1.k() != m2.k() || m1.p() != m2.p()) return false;
    const Field& F = m1.field();
    const std::size_t n = m1.n();
    ProbeConfig c = cfg;
    c.structured_random = 0;
    Rng rng(cfg.seed ^ 0x5EED);
    for (const auto& X : structured_probes(F, n, c, rng))
        if (m1(X) != m2(X)) return false;
    for (std::size_t t = 0; t < trials; ++t) {
        auto X = random_matrix(F, n, rng, cfg.degrees[t % cfg.degrees.size()]);
        if (m1(X) != m2(X)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Canonical-form recovery

namespace detail {

/// Rank-one P = u v^t with u a nonzero column of P.
inline std::pair<Vector, Vector> rank_one_factors(const ExactMatrix& P) {
    const std::size_t n = P.n();
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r)
            if (!P(r, c).is_zero()) {
                Vector u = P.column(c), v(n);
                const auto inv = P(r, c).inverse();
                for (std::size_t j = 0; j < n; ++j) v[j] = P(r, j) * inv;
                return {u, v};
            }
    throw Error("internal: rank-one factorization of zero");
}

/// The nonzero entry of a matrix supported on one position, if that is its shape.
inline std::optional<std::pair<std::pair<std::size_t, std::size_t>, ClosureElement>> single_entry(const ExactMatrix& X) {
    auto s = support(X);
    if (s.size() != 1) return std::nullopt;
    auto pos = *s.begin();
    return std::make_pair(pos, X(pos.first, pos.second));
}

/// Smallest e >= 0 with e = r_i mod m_i for all i, if the congruences agree.
inline std::optional<unsigned> solve_congruences(const std::vector<std::pair<unsigned, unsigned>>& rm) {
    unsigned e = 0, mod = 1;
    for (const auto& [r, m] : rm) {
        unsigned t = 0;
        while (t < m && (e + t * mod) % m != r % m) ++t;
        if (t == m) return std::nullopt;
        e += t * mod;
        mod = static_cast<unsigned>(lcm_u(mod, m));
        e %= mod;
    }
    return e;
}

class Canonicalizer {
public:
    Canonicalizer(const MapOracle& f, unsigned k, const ProbeConfig& cfg)
        : f_(f), F_(f.field()), n_(f.n()), k_(k), cfg_(cfg), phi_(f), rng_(cfg.seed ^ 0xCA40) {
        ProbeConfig c = cfg;
        c.structured_random = 0;
        probes_ = structured_probes(F_, n_, c, rng_);
    }

    StructuredMap run() {
        auto E = [&](std::size_t i, std::size_t j) { return ExactMatrix::unit(F_, n_, i, j); };

        // step 1: phi(0) != 0 forces a constant map; a zero phi(E_jj) forces the zero map
        const ExactMatrix Z = phi_(ExactMatrix::zero(F_, n_));
        if (!Z.is_zero()) {
            if (Z.pow(k_ + 1) != Z) reject("s3.power_preservation", "phi(0) is not (k+1)-potent", {});
            return confirm(StructuredMap::constant(Z, k_));
        }
        std::vector<ExactMatrix> P(n_, Z);
        for (std::size_t j = 0; j < n_; ++j) {
            P[j] = phi_(E(j, j));
            if (P[j].is_zero()) return confirm(StructuredMap::constant(Z, k_));
        }

        // step 2: phi(E_jj) = eps_j u_j (v_j^t / eps_j); T0 collects the u_j
        std::vector<Vector> us, vs;
        Vector eps;
        for (std::size_t j = 0; j < n_; ++j) {
            if (P[j].pow(k_ + 1) != P[j]) reject("s3.power_preservation", "phi(E_jj) is not (k+1)-potent", {E(j, j)});
            if (rank(P[j]) != 1) reject("s3.rank_equal", "phi(E_jj) does not have rank one", {E(j, j)});
            for (std::size_t i = 0; i < j; ++i)
                if (!orthogonal(P[i], P[j]))
                    reject("s3.orthogonality", "phi(E_ii) and phi(E_jj) are not orthogonal", {E(i, i), E(j, j)});
            auto [u, v] = rank_one_factors(P[j]);
            ClosureElement e = F_.zero();
            for (std::size_t t = 0; t < n_; ++t) e += v[t] * u[t];
            us.push_back(u);
            vs.push_back(v);
            eps.push_back(e);
        }
        const ClosureElement epsilon = eps[0];
        for (std::size_t j = 1; j < n_; ++j)
            if (eps[j] != epsilon) reject("s3.epsilon", "phi(E_jj) have different scalars", {E(0, 0), E(j, j)});
        if (!epsilon.pow(k_).is_one()) reject("s3.epsilon", "scalar of phi(E_11) is not a k-th root of unity", {E(0, 0)});
        const ExactMatrix T0 = ExactMatrix::from_columns(F_, us);
        ExactMatrix T0i(F_, n_);
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t t = 0; t < n_; ++t) T0i(j, t) = vs[j][t] / eps[j];
        if (!(T0i * T0).is_identity()) reject("s3.orthogonality", "phi(E_jj) are not simultaneously diagonal", {});
        const ClosureElement eps_inv = epsilon.inverse();
        auto psi = [&](const ExactMatrix& X) { return eps_inv * (T0i * phi_(X) * T0); };

        // step 3: psi(E_ij) is a multiple of E_ij throughout, or of E_ji throughout
        bool transpose = false;
        ExactMatrix G = ExactMatrix::identity(F_, n_);  // G(i,j) = g(i,j)
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                if (i == j) continue;
                auto s = single_entry(psi(E(i, j)));
                if (!s) reject("s3.off_diagonal", "psi(E_ij) is not a multiple of E_ij or E_ji", {E(i, j)});
                const bool flipped = s->first == std::make_pair(j, i);
                if (!flipped && s->first != std::make_pair(i, j))
                    reject("s3.off_diagonal", "psi(E_ij) is not a multiple of E_ij or E_ji", {E(i, j)});
                if (i == 0 && j == 1) transpose = flipped;
                if (flipped != transpose)
                    reject("s3.transpose_consistency", "off-diagonal units do not all flip the same way",
                           {E(0, 1), E(i, j)});
                G(i, j) = s->second;
            }
        auto chi = [&](const ExactMatrix& X) {
            ExactMatrix Y = psi(X);
            return transpose ? Y.transpose() : Y;
        };

        // step 4: g transitive, realized by D = diag(g(i,1))
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                for (std::size_t q = 0; q < n_; ++q)
                    if (G(i, j) * G(j, q) != G(i, q))
                        reject("s3.transitivity", "g(i,j) g(j,p) != g(i,p)", {E(i, j), E(j, q), E(i, q)});
        Vector dv(n_);
        for (std::size_t i = 0; i < n_; ++i) dv[i] = G(i, 0);
        const ExactMatrix D = ExactMatrix::diag(F_, dv);

        // step 5: omega(g_d) read off chi(g_d E_11) = omega(g_d) E_11, matched to a Frobenius power
        std::vector<std::pair<unsigned, unsigned>> congruences;
        for (unsigned d : cfg_.degrees) {
            const ClosureElement g = F_.generator(d);
            const ExactMatrix probe = g * E(0, 0);
            auto s = single_entry(chi(probe));
            if (!s || s->first != std::make_pair<std::size_t, std::size_t>(0, 0))
                reject("s3.homogeneity", "phi(g E_11) is not a multiple of phi(E_11)", {probe, E(0, 0)});
            std::optional<unsigned> r;
            for (unsigned e = 0; e < d && !r; ++e)
                if (frobenius(g, e) == s->second) r = e;
            if (!r) {
                // not a Frobenius power on this subfield; a witness settles whether it is a preserver at all
                auto w = search({probe, E(0, 0)});
                if (w) throw NotPreserver(*w, "omega(g) is not a Frobenius image of g");
                throw UnrepresentableOmega("omega(" + g.to_string() + ") = " + s->second.to_string() +
                                           " is not g^(p^e) for any e < " + std::to_string(d));
            }
            congruences.push_back({*r, d});
        }
        auto e = solve_congruences(congruences);
        if (!e) throw UnrepresentableOmega("Frobenius exponents on the probed subfields are inconsistent");

        // phi = eps T0 psi T0^{-1}, psi = D w D^{-1} or (D w D^{-1})^t = D^{-1} w^t D
        const ExactMatrix T = transpose ? T0 * inverse(D) : T0 * D;
        return confirm(StructuredMap::canonical(epsilon, T, *e, transpose, k_));
    }

private:
    /// step 6: the recovered map must agree with the oracle on the confirmation sample.
    StructuredMap confirm(StructuredMap m) {
        std::vector<ExactMatrix> sample = probes_;
        for (std::size_t t = 0; t < cfg_.random_pairs; ++t)
            sample.push_back(random_matrix(F_, n_, rng_, cfg_.degrees[t % cfg_.degrees.size()]));
        for (const auto& X : sample)
            if (m(X) != phi_(X)) reject("confirmation", "recovered form disagrees with the oracle", {X});
        return m;
    }

    std::optional<MatrixPair> search(const std::vector<ExactMatrix>& extra) {
        std::vector<ExactMatrix> probes = probes_;
        probes.push_back(ExactMatrix::zero(F_, n_));
        probes.push_back(ExactMatrix::identity(F_, n_));
        return find_violation(f_, k_, probes, nullptr, extra);
    }

    /// A failed reconstruction step: report a violating pair if one is found among the
    /// probes, otherwise name the failed condition.
    [[noreturn]] void reject(const std::string& condition, const std::string& detail,
                             const std::vector<ExactMatrix>& extra) {
        if (auto w = search(extra)) throw NotPreserver(*w, condition + ": " + detail);
        throw DegenerateOracle(condition, detail);
    }

    const MapOracle& f_;
    Field F_;
    std::size_t n_;
    unsigned k_;
    ProbeConfig cfg_;
    OracleCache phi_;
    Rng rng_;
    std::vector<ExactMatrix> probes_;
};

}  // namespace detail

/// Recovers the structured form of a preserver step by step (units, rank-one
/// factors, scaling, field map), then confirms it on E_ij, E_ii + g E_ij and
/// cfg.random_pairs random matrices.
inline StructuredMap canonicalize(const MapOracle& f, std::size_t n, unsigned k, const ProbeConfig& cfg = {}) {
    if (n != f.n()) throw DimensionMismatch("oracle dimension does not match n");
    if (k == 0) throw ConfigError("k must be positive");
    return detail::Canonicalizer(f, k, cfg).run();
}

// ---------------------------------------------------------------------------
// Property checks on preserving maps

namespace detail {

/// Instances for the property checks: (k+1)-potents, orthogonal families of
/// them, random matrices and random idempotents.
struct PropertyInstances {
    std::vector<ExactMatrix> potents;
    std::vector<std::vector<ExactMatrix>> families;  ///< mutually orthogonal (k+1)-potents
    std::vector<ExactMatrix> matrices;
    std::vector<ExactMatrix> idempotents;
};

inline PropertyInstances property_instances(const Field& F, std::size_t n, unsigned k, const SuiteConfig& cfg) {
    PropertyInstances in;
    Rng rng(cfg.seed);
    const PotentContext ctx{k + 1, n, F};
    if (cfg.exhaustive()) {
        in.potents = enumerate_potents(ctx, cfg.budget);
    } else {
        in.potents = {ExactMatrix::zero(F, n), ExactMatrix::identity(F, n)};
        for (std::size_t t = 0; t < cfg.samples; ++t) in.potents.push_back(random_potent(ctx, rng, 1 + t % 2));
    }
    for (std::size_t t = 0; t < cfg.samples; ++t)
        in.families.push_back(random_orthogonal_potents(ctx, 2 + t % 2, rng, 1 + t % 2));
    for (std::size_t t = 0; t < cfg.samples; ++t) in.matrices.push_back(random_matrix(F, n, rng, 1 + t % 2));
    const PotentContext idem{2, n, F};
    for (std::size_t t = 0; t < cfg.samples; ++t) in.idempotents.push_back(random_potent(idem, rng, 1 + t % 2));
    return in;
}

inline bool below(const ExactMatrix& P, const ExactMatrix& Q) {
    const ExactMatrix P2 = P * P;
    return P * Q == P2 && Q * P == P2;
}

}  // namespace detail

/// One report per part of the preservation lemma, plus the zero-map lemma,
/// K-homogeneity and the triple-product lemma. Parts whose hypotheses (phi(0) = 0
/// and phi != 0; phi(I) a k-th root of unity times I) do not hold are skipped.
inline std::vector<LemmaReport> check_section3_properties(const MapOracle& f, unsigned k, const SuiteConfig& cfg) {
    const Field& F = f.field();
    const std::size_t n = f.n();
    using Payload = std::vector<std::pair<std::string, ExactMatrix>>;
    const auto in = detail::property_instances(F, n, k, cfg);
    detail::OracleCache phi(f);
    std::vector<LemmaReport> out;
    const std::size_t max_pairs = std::max<std::size_t>(cfg.samples * 50, 20'000);

    // ordered and orthogonal pairs: all pairs of the potent list when affordable,
    // plus pairs built from orthogonal families
    std::vector<std::pair<ExactMatrix, ExactMatrix>> pairs;
    if (in.potents.size() * in.potents.size() <= max_pairs) {
        for (const auto& P : in.potents)
            for (const auto& Q : in.potents) pairs.push_back({P, Q});
    } else {
        Rng rng(cfg.seed ^ 0x9A1);
        for (std::size_t t = 0; t < max_pairs; ++t)
            pairs.push_back({in.potents[random_index(rng, in.potents.size())],
                             in.potents[random_index(rng, in.potents.size())]});
    }
    for (const auto& fam : in.families) {
        pairs.push_back({fam[0], fam[0] + fam[1]});
        pairs.push_back({fam[0], fam[1]});
    }

    const ExactMatrix Z = phi(ExactMatrix::zero(F, n));
    bool nonzero = false;
    for (const auto& X : in.matrices) nonzero |= !phi(X).is_zero();
    for (const auto& P : in.potents) nonzero |= !phi(P).is_zero();
    const bool h_zero = Z.is_zero() && nonzero;
    const std::string no_h_zero = Z.is_zero() ? "phi vanishes on every sample" : "phi(0) != 0";

    {
        ReportBuilder r("s3.power_preservation", cfg);
        auto run = [&](const ExactMatrix& X) {
            auto lhs = phi(X.pow(k + 1)), rhs = phi(X).pow(k + 1);
            r.check(lhs == rhs, "phi(X^(k+1)) != phi(X)^(k+1)",
                    Payload{{"X", X}, {"phi(X)", phi(X)}, {"phi(X^(k+1))", lhs}});
        };
        for (const auto& X : in.potents) run(X);
        for (const auto& X : in.matrices) run(X);
        out.push_back(r.finish());
    }
    {
        ReportBuilder r("s3.potent_preservation", cfg);
        for (const auto& P : in.potents)
            r.check(phi(P).pow(k + 1) == phi(P), "phi(P) is not (k+1)-potent", Payload{{"P", P}, {"phi(P)", phi(P)}});
        out.push_back(r.finish());
    }
    {
        ReportBuilder r("s3.order_preservation", cfg);
        for (const auto& [P, Q] : pairs)
            if (detail::below(P, Q))
                r.check(detail::below(phi(P), phi(Q)), "P below Q but phi(P) not below phi(Q)",
                        Payload{{"P", P}, {"Q", Q}, {"phi(P)", phi(P)}, {"phi(Q)", phi(Q)}});
        out.push_back(r.finish());
    }
    {
        ReportBuilder r("s3.orthogonality", cfg);
        if (!h_zero) r.skip(no_h_zero);
        else
            for (const auto& [P, Q] : pairs)
                if (orthogonal(P, Q))
                    r.check(orthogonal(phi(P), phi(Q)), "P, Q orthogonal but phi(P), phi(Q) are not",
                            Payload{{"P", P}, {"Q", Q}, {"phi(P)", phi(P)}, {"phi(Q)", phi(Q)}});
        out.push_back(r.finish());
    }
    {
        ReportBuilder lower("s3.rank_lower", cfg), equal("s3.rank_equal", cfg);
        if (!h_zero) {
            lower.skip(no_h_zero);
            equal.skip(no_h_zero);
        } else {
            for (const auto& P : in.potents) {
                const auto rp = rank(P), rf = rank(phi(P));
                Payload pl{{"P", P}, {"phi(P)", phi(P)}};
                if (!P.is_zero()) lower.check(rf >= rp, "r(phi(P)) < r(P)", pl);
                equal.check(rf == rp, "r(phi(P)) != r(P)", pl);
            }
        }
        out.push_back(lower.finish());
        out.push_back(equal.finish());
    }
    {
        ReportBuilder r("s3.orthoadditive", cfg);
        if (!h_zero) r.skip(no_h_zero);
        else
            for (const auto& [P, Q] : pairs)
                if (orthogonal(P, Q))
                    r.check(phi(P + Q) == phi(P) + phi(Q), "phi(P + Q) != phi(P) + phi(Q)",
                            Payload{{"P", P}, {"Q", Q}, {"phi(P)", phi(P)}, {"phi(Q)", phi(Q)}, {"phi(P+Q)", phi(P + Q)}});
        out.push_back(r.finish());
    }
    {
        ReportBuilder r("s3.linear_combination", cfg);
        if (!h_zero) r.skip(no_h_zero);
        else {
            Rng rng(cfg.seed ^ 0x11C);
            for (const auto& fam : in.families) {
                ExactMatrix sum = ExactMatrix::zero(F, n), images = sum;
                Payload pl;
                for (std::size_t j = 0; j < fam.size(); ++j) {
                    const ExactMatrix term = F.random(rng, 1 + j % 2) * fam[j];
                    sum += term;
                    images += phi(term);
                    pl.push_back({"lambda_P" + std::to_string(j + 1), term});
                    pl.push_back({"phi(lambda_P" + std::to_string(j + 1) + ")", phi(term)});
                }
                pl.push_back({"phi(sum)", phi(sum)});
                r.check(phi(sum) == images, "phi(sum lambda_j P_j) != sum phi(lambda_j P_j)", pl);
            }
        }
        out.push_back(r.finish());
    }
    {
        ReportBuilder r("s3.zero_map", cfg);
        std::optional<ExactMatrix> killed;
        for (const auto& X : in.matrices)
            if (!X.is_zero() && phi(X).is_zero()) killed = X;
        for (const auto& X : in.potents)
            if (!killed && !X.is_zero() && phi(X).is_zero()) killed = X;
        if (!killed) {
            r.note("holds vacuously: no nonzero sample is mapped to zero");
        } else {
            r.check(Z.is_zero(), "phi kills a nonzero matrix but not 0",
                    Payload{{"killed", *killed}, {"X", ExactMatrix::zero(F, n)}, {"phi(X)", Z}});
            for (const auto& X : in.matrices)
                r.check(phi(X).is_zero(), "phi kills a nonzero matrix but not every matrix",
                        Payload{{"killed", *killed}, {"X", X}, {"phi(X)", phi(X)}});
        }
        out.push_back(r.finish());
    }
    {
        ReportBuilder r("s3.homogeneity", cfg);
        if (!h_zero || n < 2) r.skip(n < 2 ? "needs n >= 2" : no_h_zero);
        else
            for (std::uint32_t c = 2; c < F.p(); ++c)
                for (const auto& X : in.matrices) {
                    const auto cX = F.from_int(c) * X;
                    if (!r.check(phi(cX) == F.from_int(c) * phi(X), "phi(cX) != c phi(X) for c in the prime field",
                                 Payload{{"cI", ExactMatrix::scalar(F, n, F.from_int(c))}, {"X", X}, {"phi(X)", phi(X)},
                                         {"phi(cX)", phi(cX)}}))
                        break;
                }
        out.push_back(r.finish());
    }

    // the triple-product lemma assumes phi(I) = I; phi(I) = c I with c^k = 1 is
    // reduced to it by passing to c^{-1} phi, which satisfies the same identity
    const ExactMatrix PI = phi(ExactMatrix::identity(F, n));
    std::optional<ClosureElement> c;
    if (Z.is_zero() && n >= 2 && PI == ExactMatrix::scalar(F, n, PI(0, 0)) && PI(0, 0).pow(k).is_one()) c = PI(0, 0);
    {
        ReportBuilder pw("s3.kth_power", cfg), id("s3.idempotent_preservation", cfg), tp("s3.triple_product", cfg);
        if (!c) {
            const std::string why = n < 2 ? "needs n >= 2" : "phi(0) != 0 or phi(I) is not a k-th root of unity times I";
            pw.skip(why);
            id.skip(why);
            tp.skip(why);
        } else {
            const ClosureElement ci = c->inverse();
            auto psi = [&](const ExactMatrix& X) { return ci * phi(X); };
            if (!c->is_one()) {
                const std::string s = "checked on phi(I)^{-1} phi, phi(I) = " + c->to_string() + " I";
                pw.note(s);
                id.note(s);
                tp.note(s);
            }
            for (const auto& X : in.matrices)
                pw.check(psi(X.pow(k)) == psi(X).pow(k), "psi(X^k) != psi(X)^k",
                         Payload{{"X", X}, {"phi(X)", phi(X)}, {"phi(X^k)", phi(X.pow(k))}, {"phi(I)", PI}});
            for (const auto& P : in.idempotents)
                id.check(psi(P).pow(2) == psi(P), "psi(P) is not idempotent", Payload{{"P", P}, {"phi(P)", phi(P)}, {"phi(I)", PI}});
            for (std::size_t t = 0; t < in.matrices.size(); ++t) {
                const auto& P = in.idempotents[t % in.idempotents.size()];
                const auto& X = in.matrices[t];
                const ExactMatrix inner = P * X.pow(k) * P;
                tp.check(psi(inner) == psi(P) * psi(X).pow(k) * psi(P), "psi(P X^k P) != psi(P) psi(X)^k psi(P)",
                         Payload{{"P", P}, {"X", X}, {"phi(P)", phi(P)}, {"phi(X)", phi(X)}, {"phi(PX^kP)", phi(inner)},
                                 {"phi(I)", PI}});
            }
        }
        out.push_back(pw.finish());
        out.push_back(id.finish());
        out.push_back(tp.finish());
    }
    return out;
}

}  // namespace jpow
