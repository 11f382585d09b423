#pragma once

// The lemma suite: every structural property the library relies on, checked
// on enumerated or sampled instances, one report per lemma id.

#include <algorithm>
#include <map>

#include "jpow/generate.hpp"
#include "jpow/potent.hpp"
#include "jpow/preserver.hpp"
#include "jpow/report.hpp"

namespace jpow {

namespace detail {

using Payload = std::vector<std::pair<std::string, ExactMatrix>>;

/// Independent stream per lemma, so adding a lemma does not shift the others.
inline Rng lemma_rng(const SuiteConfig& cfg, const std::string& id) {
    std::uint64_t h = cfg.seed;
    for (char c : id) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001B3ULL;
    return Rng(h);
}

/// m-potents to run the order and rank laws on, with the relation precomputed.
struct PotentSample {
    PotentContext ctx;
    bool complete = false;  ///< every prime-field m-potent is present
    std::vector<ExactMatrix> P;
    std::vector<std::vector<char>> below;  ///< below[i][j]: P[i] preceq P[j]
};

inline PotentSample potent_sample(const SuiteConfig& cfg) {
    PotentSample s;
    s.ctx = PotentContext{cfg.m, cfg.n, Field(cfg.p, cfg.tower_limit)};
    if (cfg.exhaustive()) {
        s.complete = true;
        s.P = enumerate_potents(s.ctx, cfg.budget);
    } else {
        // random potents plus chains P1 <= P1+P2 <= P1+P2+P3 built from orthogonal parts
        Rng rng = lemma_rng(cfg, "potent.sample");
        std::set<ExactMatrix> seen;
        auto add = [&](const ExactMatrix& X) {
            if (seen.insert(X).second) s.P.push_back(X);
        };
        add(ExactMatrix::zero(s.ctx.field, cfg.n));
        add(ExactMatrix::identity(s.ctx.field, cfg.n));
        for (std::size_t t = 0; s.P.size() < cfg.samples && t < 20 * cfg.samples; ++t) {
            const unsigned degree = 1 + static_cast<unsigned>(t % 2);
            if (t % 3 == 0) {
                add(random_potent(s.ctx, rng, degree));
                continue;
            }
            auto parts = random_orthogonal_potents(s.ctx, 3, rng, degree);
            ExactMatrix acc = ExactMatrix::zero(s.ctx.field, cfg.n);
            for (const auto& q : parts) add(acc += q);
        }
    }
    const std::size_t N = s.P.size();
    s.below.assign(N, std::vector<char>(N, 0));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) s.below[i][j] = preceq(s.P[i], s.P[j], s.ctx);
    return s;
}

inline LemmaReport order_reflexivity(const SuiteConfig& cfg, const PotentSample& s) {
    ReportBuilder r("order.reflexivity", cfg);
    for (std::size_t i = 0; i < s.P.size() && !r.failed(); ++i)
        r.check(s.below[i][i], "P is not below itself", {{"P", s.P[i]}});
    return r.finish();
}

inline LemmaReport order_antisymmetry(const SuiteConfig& cfg, const PotentSample& s) {
    ReportBuilder r("order.antisymmetry", cfg);
    for (std::size_t i = 0; i < s.P.size() && !r.failed(); ++i)
        for (std::size_t j = i + 1; j < s.P.size(); ++j)
            if (!r.check(!(s.below[i][j] && s.below[j][i]), "P <= Q <= P with P != Q", {{"P", s.P[i]}, {"Q", s.P[j]}}))
                break;
    return r.finish();
}

inline LemmaReport order_transitivity(const SuiteConfig& cfg, const PotentSample& s) {
    ReportBuilder r("order.transitivity", cfg);
    const std::size_t N = s.P.size();
    for (std::size_t i = 0; i < N && !r.failed(); ++i)
        for (std::size_t j = 0; j < N && !r.failed(); ++j) {
            if (!s.below[i][j] || i == j) continue;
            for (std::size_t l = 0; l < N; ++l)
                if (s.below[j][l] && j != l &&
                    !r.check(s.below[i][l], "P <= Q <= R but not P <= R", {{"P", s.P[i]}, {"Q", s.P[j]}, {"R", s.P[l]}}))
                    break;
        }
    return r.finish();
}

inline LemmaReport order_equivalent_forms(const SuiteConfig& cfg, const PotentSample& s) {
    ReportBuilder r("order.equivalent_forms", cfg);
    for (std::size_t i = 0; i < s.P.size() && !r.failed(); ++i)
        for (std::size_t j = 0; j < s.P.size(); ++j) {
            const bool a = s.below[i][j];
            const bool b = preceq_alt(s.P[i], s.P[j], s.ctx);
            const bool c = preceq_jordan(s.P[i], s.P[j], s.ctx);
            if (!r.check(a == b && b == c,
                         "preceq=" + std::to_string(a) + " alt=" + std::to_string(b) + " jordan=" + std::to_string(c),
                         {{"P", s.P[i]}, {"Q", s.P[j]}}))
                break;
        }
    return r.finish();
}

/// Maximal iff invertible. Against the complete set this is checked by brute
/// force; a non-invertible P is also shown non-maximal by P + (I - P^{m-1}).
inline LemmaReport order_maximality(const SuiteConfig& cfg, const PotentSample& s) {
    ReportBuilder r("order.maximality", cfg);
    const auto& F = s.ctx.field;
    for (std::size_t i = 0; i < s.P.size() && !r.failed(); ++i) {
        const auto& P = s.P[i];
        const bool claimed = is_maximal(P, s.ctx);
        std::optional<std::size_t> above;
        for (std::size_t j = 0; j < s.P.size() && !above; ++j)
            if (j != i && s.below[i][j]) above = j;
        if (claimed) {
            r.check(!above, "invertible P lies strictly below Q", {{"P", P}, {"Q", above ? s.P[*above] : P}});
            continue;
        }
        const ExactMatrix Q = P + ExactMatrix::identity(F, P.n()) - P.pow(s.ctx.m - 1);
        const bool lifts = Q != P && is_potent(Q, s.ctx) && preceq(P, Q, s.ctx);
        if (!r.check(lifts, "P + (I - P^{m-1}) is not strictly above P", {{"P", P}, {"Q", Q}})) break;
        if (s.complete) r.check(above.has_value(), "singular P has nothing above it", {{"P", P}});
    }
    if (!s.complete) r.note("sampled potents; maximality checked against the sample and the explicit lift");
    return r.finish();
}

/// Sums of orthogonal potents are potent and stay below a common upper bound.
inline LemmaReport order_orthogonal_sums(const SuiteConfig& cfg, const PotentSample& s) {
    ReportBuilder r("order.orthogonal_sums", cfg);
    const std::size_t N = s.P.size();
    for (std::size_t i = 0; i < N && !r.failed(); ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            if (!orthogonal(s.P[i], s.P[j])) continue;
            const ExactMatrix S = s.P[i] + s.P[j];
            if (!r.check(is_potent(S, s.ctx), "orthogonal sum is not potent", {{"P", s.P[i]}, {"Q", s.P[j]}})) break;
            bool bad = false;
            for (std::size_t l = 0; l < N && !bad; ++l)
                if (s.below[i][l] && s.below[j][l])
                    bad = !r.check(preceq(S, s.P[l], s.ctx), "P, Q <= R but P + Q is not below R",
                                   {{"P", s.P[i]}, {"Q", s.P[j]}, {"R", s.P[l]}});
            if (bad) break;
        }
    return r.finish();
}

/// Diagonal potents: P <= Q iff Q agrees with P wherever P is nonzero.
inline LemmaReport order_diagonal(const SuiteConfig& cfg, const PotentSample& s) {
    ReportBuilder r("order.diagonal", cfg);
    auto is_diag = [](const ExactMatrix& X) {
        for (std::size_t i = 0; i < X.n(); ++i)
            for (std::size_t j = 0; j < X.n(); ++j)
                if (i != j && !X(i, j).is_zero()) return false;
        return true;
    };
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.P.size(); ++i)
        if (is_diag(s.P[i])) idx.push_back(i);
    for (std::size_t a : idx) {
        for (std::size_t b : idx) {
            bool rule = true;
            for (std::size_t t = 0; t < s.P[a].n(); ++t)
                if (!s.P[a](t, t).is_zero() && s.P[b](t, t) != s.P[a](t, t)) rule = false;
            if (!r.check(rule == static_cast<bool>(s.below[a][b]), "entrywise rule disagrees with the order",
                         {{"P", s.P[a]}, {"Q", s.P[b]}}))
                break;
        }
        if (r.failed()) break;
    }
    return r.finish();
}

inline LemmaReport rank_monotone(const SuiteConfig& cfg, const PotentSample& s) {
    ReportBuilder r("rank.monotone", cfg);
    for (std::size_t i = 0; i < s.P.size() && !r.failed(); ++i)
        for (std::size_t j = 0; j < s.P.size(); ++j) {
            if (!s.below[i][j]) continue;
            const auto a = rank(s.P[i]), b = rank(s.P[j]);
            if (!r.check(a < b || (a == b && s.P[i] == s.P[j]), "P <= Q violates the rank law",
                         {{"P", s.P[i]}, {"Q", s.P[j]}}))
                break;
        }
    return r.finish();
}

inline LemmaReport rank_orthoadditive(const SuiteConfig& cfg, const PotentSample& s) {
    ReportBuilder r("rank.orthoadditive", cfg);
    std::vector<std::size_t> rk;
    for (const auto& P : s.P) rk.push_back(rank(P));
    for (std::size_t i = 0; i < s.P.size() && !r.failed(); ++i)
        for (std::size_t j = i + 1; j < s.P.size(); ++j)
            if (orthogonal(s.P[i], s.P[j]) &&
                !r.check(rank(s.P[i] + s.P[j]) == rk[i] + rk[j], "rank is not additive on an orthogonal pair",
                         {{"P", s.P[i]}, {"Q", s.P[j]}}))
                break;
    return r.finish();
}

inline LemmaReport rank_powers(const SuiteConfig& cfg, const PotentSample& s) {
    ReportBuilder r("rank.powers", cfg);
    for (const auto& P : s.P) {
        const auto rp = rank(P);
        ExactMatrix Pj = P;
        for (unsigned j = 2; j <= s.ctx.m && !r.failed(); ++j) {
            Pj = Pj * P;
            r.check(rank(Pj) == rp, "r(P^" + std::to_string(j) + ") != r(P)", {{"P", P}});
        }
        if (r.failed()) break;
    }
    return r.finish();
}

/// Every m-potent is diagonalizable exactly when p does not divide m - 1 (n >= 2).
/// When p divides m - 1, J_2(1) (padded with I) is the witness.
inline LemmaReport potent_diagonalizability(const SuiteConfig& cfg, const PotentSample& s) {
    ReportBuilder r("potent.diagonalizability", cfg);
    const auto& F = s.ctx.field;
    const bool divides = (cfg.m - 1) % cfg.p == 0;
    if (cfg.n < 2) {
        r.skip("needs n >= 2");
        return r.finish();
    }
    std::optional<ExactMatrix> non_diag;
    for (const auto& P : s.P) {
        const bool diag = is_diagonalizable(P);
        if (!diag && !non_diag) non_diag = P;
        if (!r.check(diag || divides, "non-diagonalizable potent although p does not divide m-1", {{"P", P}})) break;
    }
    if (!divides || r.failed()) return r.finish();
    ExactMatrix A = ExactMatrix::identity(F, cfg.n);
    A(0, 1) = F.one();
    const bool in_set = !s.complete || std::find(s.P.begin(), s.P.end(), A) != s.P.end();
    r.check(is_potent(A, s.ctx) && !is_diagonalizable(A) && in_set, "the unipotent witness is not a non-diagonalizable potent",
            {{"A", A}});
    r.check(!s.complete || non_diag.has_value(), "census found no non-diagonalizable potent", {{"A", A}});
    LemmaReport out = r.finish();
    if (out.passed()) {
        // the witness travels with the passing report
        out.detail = "p divides m-1; A is a non-diagonalizable potent";
        out.counterexample = {{"A", A}};
    }
    return out;
}

/// P^2 = Q^2 does not force P <= Q: P = E_11, Q = -E_11, for odd m.
inline LemmaReport order_square_counterexample(const SuiteConfig& cfg) {
    ReportBuilder r("order.square_counterexample", cfg);
    const Field F(cfg.p, cfg.tower_limit);
    const PotentContext ctx{cfg.m, cfg.n, F};
    if (cfg.m % 2 == 0) {
        r.skip("-E_11 is m-potent only for odd m");
        return r.finish();
    }
    const ExactMatrix P = ExactMatrix::unit(F, cfg.n, 0, 0), Q = -P;
    const bool ok = is_potent(P, ctx) && is_potent(Q, ctx) && P * P == Q * Q && !preceq(P, Q, ctx);
    r.check(ok, "P^2 = Q^2 with P below Q", {{"P", P}, {"Q", Q}});
    if (ok) {
        LemmaReport out = r.finish();
        out.counterexample = {{"P", P}, {"Q", Q}};
        out.detail = "P^2 = Q^2 and P is not below Q";
        return out;
    }
    return r.finish();
}

/// For idempotent P: P o a = 0 iff Pa = aP = PaP = 0, and P o a = a iff Pa = aP = PaP = a.
inline LemmaReport jordan_idempotent_calculus(const SuiteConfig& cfg) {
    ReportBuilder r("jordan.idempotent_calculus", cfg);
    Rng rng = lemma_rng(cfg, "jordan.idempotent_calculus");
    const Field F(cfg.p, cfg.tower_limit);
    const PotentContext ctx{2, cfg.n, F};
    const ExactMatrix I = ExactMatrix::identity(F, cfg.n);
    for (std::size_t t = 0; t < cfg.samples && !r.failed(); ++t) {
        const unsigned degree = 1 + static_cast<unsigned>(t % 2);
        const ExactMatrix P = random_potent(ctx, rng, degree);
        const ExactMatrix X = random_matrix(F, cfg.n, rng, degree);
        // a generic element, one killed by P, one fixed by P, and a near miss
        for (const ExactMatrix& a : {X, (I - P) * X * (I - P), P * X * P, P * X * P + (I - P) * X * P}) {
            const ExactMatrix j = jordan_product(P, a);
            const ExactMatrix Pa = P * a, aP = a * P, PaP = P * a * P;
            const bool zero_l = j.is_zero(), zero_r = Pa.is_zero() && aP.is_zero() && PaP.is_zero();
            const bool fix_l = j == a, fix_r = Pa == a && aP == a && PaP == a;
            if (!r.check(zero_l == zero_r && fix_l == fix_r, "idempotent calculus fails", {{"P", P}, {"a", a}})) break;
        }
    }
    return r.finish();
}

/// Hypotheses (a), (b), (c) on a nonempty S of off-diagonal positions force S to be all of them.
inline LemmaReport support_lemma(const SuiteConfig& cfg) {
    ReportBuilder r("support.off_diagonal", cfg);
    const std::size_t n = cfg.n;
    std::vector<std::pair<std::size_t, std::size_t>> pos;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) pos.emplace_back(i, j);
    if (pos.empty()) {
        r.skip("no off-diagonal positions for n = 1");
        return r.finish();
    }
    const Field F(cfg.p, cfg.tower_limit);
    auto as_matrix = [&](const std::set<std::pair<std::size_t, std::size_t>>& S) {
        ExactMatrix X(F, n);
        for (auto [i, j] : S) X(i, j) = F.one();
        return X;
    };
    auto test = [&](std::uint64_t mask) {
        std::set<std::pair<std::size_t, std::size_t>> S;
        for (std::size_t b = 0; b < pos.size(); ++b)
            if (mask >> b & 1) S.insert(pos[b]);
        if (S.empty() || !support_closure_check(S, n)) return r.check(true);
        return r.check(S.size() == pos.size(), "closed proper subset of the off-diagonal positions",
                       {{"support", as_matrix(S)}});
    };
    if (pos.size() <= 20) {
        for (std::uint64_t mask = 0; mask < (1ULL << pos.size()) && !r.failed(); ++mask) test(mask);
    } else {
        Rng rng = lemma_rng(cfg, "support.off_diagonal");
        test((1ULL << pos.size()) - 1);
        for (std::size_t t = 0; t < cfg.samples && !r.failed(); ++t) test(rng() & ((1ULL << pos.size()) - 1));
        r.note("sampled subsets");
    }
    return r.finish();
}

/// J_r(0) = A_r o B_r and J_r(1) = C_r o D_r with B_r, D_r idempotent.
inline LemmaReport generate_auxiliary(const SuiteConfig& cfg) {
    ReportBuilder r("generate.auxiliary_blocks", cfg);
    const Field F(cfg.p, cfg.tower_limit);
    for (std::size_t s = 2; s <= std::max<std::size_t>(cfg.n, 2) && !r.failed(); ++s) {
        const auto A = aux_A(F, s), B = aux_B(F, s), C = aux_C(F, s), D = aux_D(F, s);
        r.check(B * B == B && D * D == D, "auxiliary idempotent fails", {{"B", B}, {"D", D}});
        r.check(jordan_product(A, B) == jordan_block(F, s, F.zero()), "A o B != J(0)", {{"A", A}, {"B", B}});
        r.check(jordan_product(C, D) == jordan_block(F, s, F.one()), "C o D != J(1)", {{"C", C}, {"D", D}});
        r.check(mixed_product(B, A, cfg.k) == jordan_block(F, s, F.zero()), "B^k o A != J(0)", {{"A", A}, {"B", B}});
        r.check(mixed_product(D, C, cfg.k) == jordan_block(F, s, F.one()), "D^k o C != J(1)", {{"C", C}, {"D", D}});
    }
    return r.finish();
}

inline LemmaReport generate_certificates(const SuiteConfig& cfg) {
    ReportBuilder r("generate.certificates", cfg);
    Rng rng = lemma_rng(cfg, "generate.certificates");
    const Field F(cfg.p, cfg.tower_limit);
    std::size_t deepest = 0;
    auto one = [&](const ExactMatrix& X) {
        auto c = certify(X, cfg.k);
        deepest = std::max(deepest, c->depth());
        return r.check(eval(c, cfg.k) == X, "eval(certify(X)) != X", {{"X", X}});
    };
    if (cfg.exhaustive() && prime_matrix_count(cfg.p, cfg.n) <= 1000) {
        for_each_prime_matrix(F, cfg.n, cfg.budget, [&](const ExactMatrix& X) {
            if (!r.failed()) one(X);
        });
    } else {
        one(ExactMatrix::zero(F, cfg.n));
        one(ExactMatrix::identity(F, cfg.n));
        for (std::size_t t = 0; t < cfg.samples && !r.failed(); ++t)
            one(random_matrix(F, cfg.n, rng, 1 + static_cast<unsigned>(t % 2)));
    }
    r.note("deepest certificate " + std::to_string(deepest));
    return r.finish();
}

/// First single-entry change that still replays, if any.
inline std::optional<SimplicityWitness> surviving_mutation(const SimplicityWitness& w, const ExactMatrix& seed,
                                                           unsigned k, std::size_t& tried) {
    const std::size_t n = seed.n();
    for (std::size_t s = 0; s < w.steps.size(); ++s)
        for (int which = 0; which < 4; ++which)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    SimplicityWitness t = w;
                    auto& st = t.steps[s];
                    ExactMatrix& M = which == 0 ? st.p : which == 1 ? st.q : which == 2 ? st.power : st.result;
                    M(i, j) += M.field().one();
                    ++tried;
                    if (replay(t, seed, k)) return t;
                }
    return std::nullopt;
}

inline LemmaReport generate_witnesses(const SuiteConfig& cfg) {
    ReportBuilder r("generate.simplicity_witnesses", cfg);
    Rng rng = lemma_rng(cfg, "generate.simplicity_witnesses");
    const Field F(cfg.p, cfg.tower_limit);
    const std::size_t count = std::min<std::size_t>(cfg.samples, 25);
    std::size_t mutations = 0;
    for (std::size_t t = 0; t < count && !r.failed(); ++t) {
        const ExactMatrix X = random_nonzero_matrix(F, cfg.n, rng, 1 + static_cast<unsigned>(t % 2));
        const auto w = simplicity_witness(X, cfg.k, rng());
        const auto res = replay(w, X, cfg.k);
        if (!r.check(res.ok, "witness does not replay: " + res.reason, {{"seed", X}})) {
            if (res.failed_step) r.set_step(*res.failed_step);
            break;
        }
        if (auto bad = surviving_mutation(w, X, cfg.k, mutations)) r.check(false, "a mutated witness still replays", {{"seed", X}});
        else r.check(true);
    }
    r.note(std::to_string(mutations) + " single-entry mutations rejected");
    return r.finish();
}

/// Merges reports that share an id: counts add up, the first failure wins.
inline void merge_into(std::map<std::string, LemmaReport>& out, LemmaReport rep, const std::string& origin) {
    auto it = out.find(rep.lemma_id);
    if (rep.verdict == Verdict::Fail) rep.detail = origin + ": " + rep.detail;
    if (it == out.end()) {
        out.emplace(rep.lemma_id, std::move(rep));
        return;
    }
    auto& cur = it->second;
    cur.checked += rep.checked;
    cur.wall_seconds += rep.wall_seconds;
    const bool take = (rep.verdict == Verdict::Fail && cur.verdict != Verdict::Fail) ||
                      (rep.verdict == Verdict::Pass && cur.verdict == Verdict::Skipped);
    if (take) {
        cur.verdict = rep.verdict;
        cur.detail = rep.detail;
        cur.counterexample = std::move(rep.counterexample);
        cur.step = rep.step;
    }
}

inline std::vector<LemmaReport> preserver_suite(const SuiteConfig& cfg) {
    const Field F(cfg.p, cfg.tower_limit);
    Rng rng = lemma_rng(cfg, "preserver");
    std::map<std::string, LemmaReport> merged;

    // preserver properties on the identity and on a random canonical map
    for (auto& rep : check_section3_properties(MapOracle::of(StructuredMap::canonical(F.one(), ExactMatrix::identity(F, cfg.n), 0, false, cfg.k), "identity"), cfg.k, cfg))
        merge_into(merged, std::move(rep), "identity");
    const auto sample_map = random_canonical_map(F, cfg.n, cfg.k, rng);
    for (auto& rep : check_section3_properties(MapOracle::of(sample_map, "canonical"), cfg.k, cfg))
        merge_into(merged, std::move(rep), "random canonical map");

    ProbeConfig probes;
    probes.seed = cfg.seed;
    probes.random_pairs = std::min<std::size_t>(cfg.samples, 100);
    {
        ReportBuilder r("preserver.round_trip", cfg);
        const std::size_t count = std::min<std::size_t>(cfg.samples, 6);
        for (std::size_t t = 0; t < count && !r.failed(); ++t) {
            const auto m = random_canonical_map(F, cfg.n, cfg.k, rng);
            const auto f = MapOracle::of(m);
            const auto v = verify_identity(f, cfg.k, probes);
            if (!r.check(v.pass, "canonical map fails the identity",
                         v.witness ? Payload{{"A", v.witness->first}, {"B", v.witness->second}} : Payload{}))
                break;
            const auto back = canonicalize(f, cfg.n, cfg.k, probes);
            ProbeConfig fresh = probes;
            fresh.seed = rng();
            r.check(equivalent(m, back, 100, fresh), "recovered map differs", {{"T", m.as_canonical().T}});
        }
        auto done = r.finish();
        merged.emplace(done.lemma_id, std::move(done));
    }
    {
        ReportBuilder r("preserver.negative_controls", cfg);
        const ExactMatrix E = ExactMatrix::unit(F, cfg.n, 0, 0);
        std::vector<MapOracle> controls{
            MapOracle(F, cfg.n, [E](const ExactMatrix& X) { return X + E; }, "X + E_11"),
            MapOracle(F, cfg.n, [](const ExactMatrix& X) { return X * X; }, "X^2"),
            MapOracle(F, cfg.n, [](const ExactMatrix& X) { return X.map([](const ClosureElement& a) { return a * a; }); },
                      "entrywise square")};
        for (const auto& f : controls) {
            const auto v = verify_identity(f, cfg.k, probes);
            const bool ok = !v.pass && v.witness && !identity_holds(f, v.witness->first, v.witness->second, cfg.k);
            if (!r.check(ok, f.name() + " passes the identity")) break;
        }
        auto done = r.finish();
        merged.emplace(done.lemma_id, std::move(done));
    }
    std::vector<LemmaReport> out;
    for (auto& [id, rep] : merged) out.push_back(std::move(rep));
    return out;
}

}  // namespace detail

/// Runs every lemma for one configuration; reports are ordered by lemma_id.
inline std::vector<LemmaReport> run_lemma_suite(const SuiteConfig& cfg) {
    cfg.validate();
    std::vector<LemmaReport> out;
    const auto s = detail::potent_sample(cfg);
    out.push_back(detail::order_reflexivity(cfg, s));
    out.push_back(detail::order_antisymmetry(cfg, s));
    out.push_back(detail::order_transitivity(cfg, s));
    out.push_back(detail::order_equivalent_forms(cfg, s));
    out.push_back(detail::order_maximality(cfg, s));
    out.push_back(detail::order_orthogonal_sums(cfg, s));
    out.push_back(detail::order_diagonal(cfg, s));
    out.push_back(detail::rank_monotone(cfg, s));
    out.push_back(detail::rank_orthoadditive(cfg, s));
    out.push_back(detail::rank_powers(cfg, s));
    out.push_back(detail::potent_diagonalizability(cfg, s));
    out.push_back(detail::order_square_counterexample(cfg));
    out.push_back(detail::jordan_idempotent_calculus(cfg));
    out.push_back(detail::support_lemma(cfg));
    out.push_back(detail::generate_auxiliary(cfg));
    out.push_back(detail::generate_certificates(cfg));
    out.push_back(detail::generate_witnesses(cfg));
    for (auto& rep : detail::preserver_suite(cfg)) out.push_back(std::move(rep));
    std::sort(out.begin(), out.end(), [](const LemmaReport& a, const LemmaReport& b) { return a.lemma_id < b.lemma_id; });
    return out;
}

}  // namespace jpow
