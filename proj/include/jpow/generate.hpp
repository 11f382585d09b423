#pragma once

// Generation certificates (every matrix as iterated mixed products of k-th
// powers) and simplicity witnesses (a replayable chain from a nonzero seed to
// the identity).

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jpow/jordan.hpp"
#include "jpow/random.hpp"

namespace jpow {

// ---------------------------------------------------------------------------
// Certificates

/// Leaf{base} stands for base^k; Node{left, right} for eval(left)^k o eval(right).
class GenerationCertificate {
public:
    using Ptr = std::shared_ptr<const GenerationCertificate>;

    static Ptr leaf(ExactMatrix base) {
        auto c = std::make_shared<GenerationCertificate>();
        c->base_ = std::move(base);
        c->n_ = c->base_->n();
        return c;
    }
    static Ptr node(Ptr left, Ptr right) {
        if (!left || !right) throw Error("certificate node needs two children");
        if (left->n() != right->n()) throw DimensionMismatch("certificate children differ in dimension");
        auto c = std::make_shared<GenerationCertificate>();
        c->n_ = left->n();
        c->left_ = std::move(left);
        c->right_ = std::move(right);
        return c;
    }

    bool is_leaf() const { return base_.has_value(); }
    const ExactMatrix& base() const { return *base_; }
    const Ptr& left() const { return left_; }
    const Ptr& right() const { return right_; }
    std::size_t n() const { return n_; }

    std::size_t depth() const { return is_leaf() ? 0 : 1 + std::max(left_->depth(), right_->depth()); }
    std::size_t size() const { return is_leaf() ? 1 : 1 + left_->size() + right_->size(); }

private:
    std::optional<ExactMatrix> base_;
    Ptr left_, right_;
    std::size_t n_ = 0;
};

using CertPtr = GenerationCertificate::Ptr;

inline ExactMatrix eval(const GenerationCertificate& c, unsigned k) {
    if (c.is_leaf()) return c.base().pow(k);
    return mixed_product(eval(*c.left(), k), eval(*c.right(), k), k);
}
inline ExactMatrix eval(const CertPtr& c, unsigned k) { return eval(*c, k); }

namespace detail {

/// diag(a, b) at the certificate level; mismatched shapes are aligned by
/// rewriting Leaf{a} as Node{Leaf{I}, Leaf{a}}.
inline CertPtr cert_block_diag(const CertPtr& a, const CertPtr& b) {
    if (a->is_leaf() && b->is_leaf()) return GenerationCertificate::leaf(block_diag(a->base(), b->base()));
    auto lift = [](const CertPtr& c) {
        if (!c->is_leaf()) return c;
        return GenerationCertificate::node(
            GenerationCertificate::leaf(ExactMatrix::identity(c->base().field(), c->n())), c);
    };
    CertPtr x = lift(a), y = lift(b);
    return GenerationCertificate::node(cert_block_diag(x->left(), y->left()), cert_block_diag(x->right(), y->right()));
}

/// S c S^{-1}, pushed into every leaf.
inline CertPtr cert_conjugate(const CertPtr& c, const ExactMatrix& S, const ExactMatrix& S_inv) {
    if (c->is_leaf()) return GenerationCertificate::leaf(S * c->base() * S_inv);
    return GenerationCertificate::node(cert_conjugate(c->left(), S, S_inv), cert_conjugate(c->right(), S, S_inv));
}

inline ExactMatrix aux_A(const Field& F, std::size_t r) {
    // 2E_11 - E_13 + sum_{2<=j<=r-1} E_{j,j+1}, 1-based, indices >= r dropped
    ExactMatrix A(F, r);
    A(0, 0) = F.from_int(2);
    if (r >= 3) A(0, 2) = F.from_int(-1);
    for (std::size_t j = 1; j + 1 < r; ++j) A(j, j + 1) = F.one();
    return A;
}
inline ExactMatrix aux_B(const Field& F, std::size_t r) {
    ExactMatrix B = ExactMatrix::identity(F, r);
    B(0, 0) = F.zero();
    B(0, 1) = F.one();
    return B;
}
inline ExactMatrix aux_C(const Field& F, std::size_t r) {
    ExactMatrix C = jordan_block(F, r, F.one());
    C(0, 1) += F.one();
    if (r >= 3) C(1, 2) += F.one();
    C(0, 0) -= F.one();
    C(1, 1) -= F.one();
    return C;
}
inline ExactMatrix aux_D(const Field& F, std::size_t r) {
    ExactMatrix D = ExactMatrix::identity(F, r);
    D(1, 1) = F.zero();
    D(1, 0) = F.one();
    return D;
}

inline void expect_blocks(const JordanDecomposition& jd, std::vector<JordanBlock> expected, const char* name) {
    auto got = jd.blocks;
    auto key = [](const JordanBlock& a, const JordanBlock& b) {
        return a.eigenvalue < b.eigenvalue || (a.eigenvalue == b.eigenvalue && a.size < b.size);
    };
    std::sort(got.begin(), got.end(), key);
    std::sort(expected.begin(), expected.end(), key);
    if (got != expected) throw NotDiagonalizableAuxiliary(std::string(name) + " has unexpected Jordan structure");
}

struct CertifyState {
    unsigned k;
    std::size_t depth_budget;
};

inline CertPtr certify_impl(const ExactMatrix& X, const CertifyState& st);

inline CertPtr certify_block(const Field& F, std::size_t r, const ClosureElement& lambda, const CertifyState& st) {
    if (r == 1) {
        ExactMatrix base(F, 1);
        base(0, 0) = min_kth_root(lambda, st.k);
        return GenerationCertificate::leaf(base);
    }
    if (lambda.is_zero()) {
        ExactMatrix A = aux_A(F, r);
        expect_blocks(jordan_form(A), {{F.from_int(2), 1}, {F.zero(), r - 1}}, "A_r");
        return GenerationCertificate::node(GenerationCertificate::leaf(aux_B(F, r)), certify_impl(A, st));
    }
    if (lambda.is_one()) {
        ExactMatrix C = aux_C(F, r);
        std::vector<JordanBlock> want{{F.zero(), 2}};
        if (r > 2) want.push_back({F.one(), r - 2});
        expect_blocks(jordan_form(C), want, "C_r");
        return GenerationCertificate::node(GenerationCertificate::leaf(aux_D(F, r)), certify_impl(C, st));
    }
    // (nu I)^k is mu I with mu^k = lambda, so the node evaluates to lambda J_r(1)
    CertPtr scaled;
    try {
        const ClosureElement nu = min_kth_root(min_kth_root(lambda, st.k), st.k);
        scaled = GenerationCertificate::node(GenerationCertificate::leaf(ExactMatrix::scalar(F, r, nu)),
                                             certify_block(F, r, F.one(), st));
    } catch (const TowerLimitExceeded&) {
        // the k^2-th root left the tower: use lambda J_r(1) = D_r^k o (lambda C_r) instead
        scaled = GenerationCertificate::node(GenerationCertificate::leaf(aux_D(F, r)),
                                             certify_impl(lambda * aux_C(F, r), st));
    }
    Vector d(r), d_inv(r);
    ClosureElement pw = F.one();
    for (std::size_t i = 0; i < r; ++i) {
        d[i] = pw;
        d_inv[i] = pw.inverse();
        pw = pw * lambda;
    }
    return cert_conjugate(scaled, ExactMatrix::diag(F, d), ExactMatrix::diag(F, d_inv));
}

inline CertPtr certify_impl(const ExactMatrix& X, const CertifyState& st) {
    const Field& F = X.field();
    auto jd = jordan_form(X);
    CertPtr acc;
    for (const auto& b : jd.blocks) {
        CertPtr c = certify_block(F, b.size, b.eigenvalue, st);
        acc = acc ? cert_block_diag(acc, c) : c;
    }
    bool trivial = jd.S.is_identity();
    CertPtr out = trivial ? acc : cert_conjugate(acc, jd.S, jd.S_inv);
    if (out->depth() > st.depth_budget)
        throw BudgetExceeded("certificate depth " + std::to_string(out->depth()) + " exceeds budget " +
                             std::to_string(st.depth_budget));
    return out;
}

}  // namespace detail

inline constexpr std::size_t kDefaultDepthBudget = 64;

/// Certificate tree with eval(result, k) = X.
inline CertPtr certify(const ExactMatrix& X, unsigned k, std::size_t depth_budget = kDefaultDepthBudget) {
    if (k == 0) throw ConfigError("k must be positive");
    if (X.is_identity()) return GenerationCertificate::leaf(X);
    return detail::certify_impl(X, detail::CertifyState{k, depth_budget});
}

// ---------------------------------------------------------------------------
// Simplicity witnesses

struct WitnessStep {
    ExactMatrix p;  ///< left operand, raised to the k-th power
    ExactMatrix q;  ///< right operand
    bool prior_is_left = false;
    ExactMatrix result;  ///< p^k o q
    ExactMatrix power;   ///< recorded value of p^k
};

struct SimplicityWitness {
    std::vector<WitnessStep> steps;
};

struct ReplayResult {
    bool ok = false;
    std::optional<std::size_t> failed_step;  ///< index of the first bad step, or steps.size() for a bad endpoint
    std::string reason;
    explicit operator bool() const { return ok; }
};

/// Rechecks every step from the seed; the chain must end at the identity.
inline ReplayResult replay(const SimplicityWitness& w, const ExactMatrix& seed, unsigned k) {
    std::vector<ExactMatrix> known{seed};
    for (std::size_t s = 0; s < w.steps.size(); ++s) {
        const auto& st = w.steps[s];
        try {
            const ExactMatrix& prior = st.prior_is_left ? st.p : st.q;
            if (std::find(known.begin(), known.end(), prior) == known.end())
                return {false, s, "prior operand is neither the seed nor an earlier result"};
            const ExactMatrix pk = st.p.pow(k);
            if (pk != st.power) return {false, s, "recorded power of the left operand does not recompute"};
            if (jordan_product(pk, st.q) != st.result) return {false, s, "result does not recompute"};
        } catch (const Error& e) {
            return {false, s, e.what()};
        }
        known.push_back(st.result);
    }
    const ExactMatrix& last = w.steps.empty() ? seed : w.steps.back().result;
    if (!last.is_identity()) return {false, w.steps.size(), "chain does not end at the identity"};
    return {true, std::nullopt, ""};
}

namespace detail {

/// Applies the single-entry mutation used for tamper checks: entry (i,j) += 1.
inline ExactMatrix bump(ExactMatrix M, std::size_t i, std::size_t j) {
    M(i, j) += M.field().one();
    return M;
}

class WitnessBuilder {
public:
    WitnessBuilder(const ExactMatrix& seed, unsigned k, std::uint64_t rng_seed)
        : F_(seed.field()), n_(seed.n()), k_(k), rng_(rng_seed), current_(seed) {
        known_.push_back(seed);
    }

    const ExactMatrix& current() const { return current_; }
    SimplicityWitness take() { return std::move(w_); }

    /// Moves from the current element to `target` with one step aux^k o current,
    /// or current^k o aux when no aux on the left is tamper-evident. `proof_m`
    /// is the k-th power the textbook construction would use for the left aux.
    /// When neither orientation is tamper-evident the step detours through a
    /// random intermediate element. A step that would not change the current
    /// element is dropped unless `force` is set.
    void step(const ExactMatrix& target, const std::optional<ExactMatrix>& proof_m, bool force = false) {
        if (target == current_ && !force) return;
        auto direct = plan(current_, target, proof_m);
        if (!direct) throw Error("internal: no auxiliary found for a witness step");
        if (!direct->second) {
            for (int t = 0; t < kDetours; ++t) {
                ExactMatrix A = random_matrix(F_, n_, rng_);
                ExactMatrix W = mixed_product(A, current_, k_);
                if (W.is_zero() || W == target || std::find(known_.begin(), known_.end(), W) != known_.end())
                    continue;
                if (tamper_level(A, current_, W) == 0) continue;
                known_.push_back(W);
                auto second = plan(W, target, std::nullopt);
                known_.pop_back();
                if (!second || !second->second) continue;
                commit({A, current_, false, W, A.pow(k_)});
                commit(second->first);
                return;
            }
        }
        commit(direct->first);
    }

private:
    static constexpr int kDetours = 100;

    void commit(WitnessStep st) {
        known_.push_back(st.result);
        current_ = st.result;
        w_.steps.push_back(std::move(st));
    }

    /// A step from Z to `target` and whether every single-entry edit of it is caught.
    std::optional<std::pair<WitnessStep, bool>> plan(const ExactMatrix& Z, const ExactMatrix& target,
                                                     const std::optional<ExactMatrix>& proof_m) {
        std::optional<ExactMatrix> pinned, fallback, chosen;
        auto attempt = [&](const ExactMatrix& M, bool randomize) -> std::optional<ExactMatrix> {
            auto A = root_of(M, randomize);
            if (!A) return std::nullopt;
            if (mixed_product(*A, Z, k_) != target) throw Error("internal: witness step does not reproduce");
            if (!fallback) fallback = A;
            const int level = tamper_level(*A, Z, target);
            if (level == 2) return A;
            if (level == 1 && !pinned) pinned = A;
            return std::nullopt;
        };
        if (auto sol = solve_for_m(Z, target)) {
            const auto& [m0, kernel] = *sol;
            if (proof_m) chosen = attempt(*proof_m, false);
            if (!chosen) chosen = attempt(m0, false);
            for (int t = 0; t < kAttempts && !chosen; ++t) {
                ExactMatrix M = m0;
                for (const auto& v : kernel) {
                    auto c = F_.from_int(static_cast<std::int64_t>(rng_() % F_.p()));
                    if (c.is_zero()) continue;
                    for (std::size_t i = 0; i < n_ * n_; ++i) M(i / n_, i % n_) += c * v[i];
                }
                chosen = attempt(M, true);
                if (!chosen && pinned && t >= kAttempts / 4) break;
                if (!chosen && kernel.empty()) break;
            }
        }
        if (chosen) return std::make_pair(WitnessStep{*chosen, Z, false, target, chosen->pow(k_)}, true);
        if (pinned) return std::make_pair(WitnessStep{*pinned, Z, false, target, pinned->pow(k_)}, true);
        const ExactMatrix Zk = Z.pow(k_);
        auto lin = solve_for_m(Zk, target);
        if (lin && left_tight(Z, Zk, lin->first, target))
            return std::make_pair(WitnessStep{Z, lin->first, true, target, Zk}, true);
        if (fallback) return std::make_pair(WitnessStep{*fallback, Z, false, target, fallback->pow(k_)}, false);
        if (lin) return std::make_pair(WitnessStep{Z, lin->first, true, target, Zk}, false);
        return std::nullopt;
    }

private:
    static constexpr int kAttempts = 200;

    std::optional<std::pair<ExactMatrix, std::vector<Vector>>> solve_for_m(const ExactMatrix& Z, const ExactMatrix& R) {
        const std::size_t N = n_ * n_;
        const ClosureElement h = half(F_);
        std::vector<Vector> rows(N, Vector(N, F_.zero()));
        Vector rhs(N);
        // (M Z + Z M)/2 at (r,c): coefficient of M_ab is (d_ar Z_bc + Z_ra d_bc)/2
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t c = 0; c < n_; ++c) {
                auto& row = rows[r * n_ + c];
                for (std::size_t b = 0; b < n_; ++b) row[r * n_ + b] += h * Z(b, c);
                for (std::size_t a = 0; a < n_; ++a) row[a * n_ + c] += h * Z(r, a);
                rhs[r * n_ + c] = R(r, c);
            }
        auto sol = solve_linear(rows, rhs, N, F_);
        if (!sol) return std::nullopt;
        ExactMatrix M0(F_, n_);
        for (std::size_t i = 0; i < N; ++i) M0(i / n_, i % n_) = sol->first[i];
        return std::make_pair(M0, sol->second);
    }

    std::optional<ExactMatrix> root_of(const ExactMatrix& M, bool randomize) {
        JordanDecomposition jd;
        try {
            jd = jordan_form(M);
        } catch (const TowerLimitExceeded&) {
            return std::nullopt;
        }
        for (const auto& b : jd.blocks)
            if (b.size != 1) return std::nullopt;
        if (!randomize) return jd.S * ExactMatrix::diag(F_, root_choice(jd, false)) * jd.S_inv;
        // mix eigenvectors inside each eigenspace, then pick random roots
        ExactMatrix mix = ExactMatrix::identity(F_, n_);
        for (std::size_t lo = 0; lo < n_;) {
            std::size_t hi = lo;
            while (hi < n_ && jd.blocks[hi].eigenvalue == jd.blocks[lo].eigenvalue) ++hi;
            if (hi - lo > 1) {
                ExactMatrix sub = random_invertible(F_, hi - lo, rng_);
                for (std::size_t i = lo; i < hi; ++i)
                    for (std::size_t j = lo; j < hi; ++j) mix(i, j) = sub(i - lo, j - lo);
            }
            lo = hi;
        }
        ExactMatrix S = jd.S * mix;
        return S * ExactMatrix::diag(F_, root_choice(jd, true)) * inverse(S);
    }

    Vector root_choice(const JordanDecomposition& jd, bool randomize) {
        Vector d;
        for (const auto& b : jd.blocks) {
            auto roots = kth_roots(b.eigenvalue, k_);
            d.push_back(randomize ? roots[random_index(rng_, roots.size())] : roots.front());
        }
        return d;
    }

    /// With the prior Z on the left the aux B enters linearly, so an edit of B
    /// survives only if the changed unit lies in the kernel of B -> Z^k o B.
    bool left_tight(const ExactMatrix& Z, const ExactMatrix& Zk, const ExactMatrix& B, const ExactMatrix& R) const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                if (jordan_product(Zk, ExactMatrix::unit(F_, n_, i, j)).is_zero()) return false;
                ExactMatrix Zb = bump(Z, i, j);
                if (std::find(known_.begin(), known_.end(), Zb) != known_.end() && jordan_product(Zb.pow(k_), B) == R)
                    return false;
            }
        return true;
    }

    /// 2: no +1 entry change of the aux, or of the prior into another known
    /// element, leaves the step valid. 1: the same holds once the aux is tied
    /// to its recorded k-th power. 0: neither.
    int tamper_level(const ExactMatrix& A, const ExactMatrix& Z, const ExactMatrix& R) const {
        const ExactMatrix Ak = A.pow(k_);
        int level = 2;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                ExactMatrix Zb = bump(Z, i, j);
                if (std::find(known_.begin(), known_.end(), Zb) != known_.end() && jordan_product(Ak, Zb) == R)
                    return 0;
                ExactMatrix Abk = bump(A, i, j).pow(k_);
                if (Abk == Ak) return 0;
                if (level == 2 && jordan_product(Abk, Z) == R) level = 1;
            }
        return level;
    }

    Field F_;
    std::size_t n_;
    unsigned k_;
    Rng rng_;
    ExactMatrix current_;
    std::vector<ExactMatrix> known_;
    SimplicityWitness w_;
};

inline ExactMatrix embed_top_left(const ExactMatrix& A, std::size_t n) {
    ExactMatrix r(A.field(), n);
    for (std::size_t i = 0; i < A.n(); ++i)
        for (std::size_t j = 0; j < A.n(); ++j) r(i, j) = A(i, j);
    return r;
}

struct Target {
    ExactMatrix value;
    std::optional<ExactMatrix> proof_m;
};

/// Targets leading from E_11 to I_size, inside M_size.
inline void identity_targets(const Field& F, std::size_t size, std::vector<Target>& out) {
    if (size == 1) return;
    const std::size_t m = size / 2;
    const std::size_t top = size % 2 ? m + 1 : m;
    std::vector<Target> sub;
    identity_targets(F, top, sub);
    for (auto& t : sub)
        out.push_back({embed_top_left(t.value, size),
                       t.proof_m ? std::optional<ExactMatrix>(embed_top_left(*t.proof_m, size)) : std::nullopt});
    const auto two = F.from_int(2);
    ExactMatrix shift(F, size), M(F, size);
    if (size % 2 == 0) {
        for (std::size_t i = 0; i < m; ++i) {
            shift(i, m + i) = F.one();
            M(i, i) = two;
            M(m + i, i) = two;
            M(m + i, m + i) = -two;
        }
    } else {
        for (std::size_t i = 0; i < m; ++i) {
            shift(i, m + 1 + i) = F.one();
            M(i, i) = two;
            M(m + 1 + i, i) = two;
            M(m + 1 + i, m + 1 + i) = -two;
        }
        shift(m, m) = F.one();
        M(m, m) = F.one();
    }
    out.push_back({shift, std::nullopt});
    out.push_back({ExactMatrix::identity(F, size), M});
}

}  // namespace detail

/// Chain from a nonzero seed to I_n following the closure argument; each step
/// is aux^k o prior with an aux chosen so that single-entry edits are detected.
inline SimplicityWitness simplicity_witness(const ExactMatrix& X, unsigned k, std::uint64_t rng_seed = 0) {
    if (k == 0) throw ConfigError("k must be positive");
    if (X.is_zero()) throw ZeroSeed();
    const Field& F = X.field();
    const std::size_t n = X.n();
    detail::WitnessBuilder b(X, k, rng_seed ^ 0xA5A5A5A5ULL);
    if (X.is_identity()) return b.take();
    auto E = [&](std::size_t i, std::size_t j) { return ExactMatrix::unit(F, n, i, j); };

    // reduce a matrix with a nonzero (i,j), i != j, to E_ii
    auto off_diagonal = [&](std::size_t i, std::size_t j) {
        const ExactMatrix& Z = b.current();
        const ClosureElement xij = Z(i, j), xji = Z(j, i);
        const ExactMatrix pair = xij * E(i, j) + xji * E(j, i);
        if (Z != pair) {
            b.step(mixed_product(E(i, i), Z, k), E(i, i));
            b.step(F.from_int(4).inverse() * pair, E(j, j));
            b.step(pair, ExactMatrix::scalar(F, n, F.from_int(4)));
        }
        const ClosureElement two = F.from_int(2);
        ExactMatrix M = two * E(i, i) + (two / xij) * E(j, i) - two * E(j, j);
        b.step(E(i, i) + E(j, j), M);
        b.step(E(i, i), E(i, i));
    };

    std::size_t pivot = n;
    std::optional<std::pair<std::size_t, std::size_t>> off;
    for (std::size_t i = 0; i < n && !off; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && !X(i, j).is_zero()) {
                off = std::make_pair(i, j);
                break;
            }
    if (off) {
        off_diagonal(off->first, off->second);
        pivot = off->first;
    } else {
        for (std::size_t i = 0; i < n; ++i)
            if (!X(i, i).is_zero()) {
                pivot = i;
                break;
            }
        const ClosureElement x = X(pivot, pivot);
        b.step(x * E(pivot, pivot), E(pivot, pivot), true);
        b.step(E(pivot, pivot), ExactMatrix::scalar(F, n, x.inverse()));
    }
    if (pivot != 0) {
        b.step(E(0, pivot), std::nullopt);
        off_diagonal(0, pivot);
    }
    std::vector<detail::Target> targets;
    detail::identity_targets(F, n, targets);
    for (const auto& t : targets) b.step(t.value, t.proof_m);
    return b.take();
}

}  // namespace jpow
