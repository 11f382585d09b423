#pragma once

// Suite configuration and the per-lemma report record shared by the property
// suites and the command-line tool.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jpow/field.hpp"
#include "jpow/matrix.hpp"
#include "jpow/potent.hpp"

namespace jpow {

enum class SuiteMode { Auto, Exhaustive, Random };

inline std::string to_string(SuiteMode m) {
    switch (m) {
        case SuiteMode::Exhaustive: return "exhaustive";
        case SuiteMode::Random: return "random";
        default: return "auto";
    }
}

inline SuiteMode parse_suite_mode(const std::string& s) {
    if (s == "auto") return SuiteMode::Auto;
    if (s == "exhaustive") return SuiteMode::Exhaustive;
    if (s == "random") return SuiteMode::Random;
    throw ConfigError("unknown mode '" + s + "' (expected auto, exhaustive or random)");
}

/// Auto mode enumerates M_n(F_p) only up to this many matrices; order checks
/// are quadratic in the number of potents found.
inline constexpr std::uint64_t kAutoExhaustiveLimit = 100'000;

struct SuiteConfig {
    std::uint32_t p = 5;
    std::size_t n = 3;
    unsigned k = 2;
    unsigned m = 3;  ///< potency exponent for the order calculus
    std::uint64_t seed = 0xC0FFEE;
    std::size_t samples = 200;
    SuiteMode mode = SuiteMode::Auto;
    unsigned tower_limit = kDefaultTowerLimit;
    std::uint64_t budget = kDefaultEnumerationBudget;
    std::string out;  ///< report path; empty means stdout

    void validate() const {
        FieldConfig{p, tower_limit}.validate();
        if (n < 1 || n > 16) throw ConfigError("n must be between 1 and 16");
        if (k < 1) throw ConfigError("k must be positive");
        if (m < 2) throw ConfigError("m must be at least 2");
        if (samples < 1) throw ConfigError("samples must be positive");
        if (mode == SuiteMode::Exhaustive && prime_matrix_count(p, n) > budget)
            throw ConfigError("exhaustive mode needs " + std::to_string(p) + "^" + std::to_string(n * n) +
                              " matrices, above the enumeration budget");
    }

    /// Whether the suites enumerate M_n(F_p) rather than sample it.
    bool exhaustive() const {
        if (mode == SuiteMode::Exhaustive) return true;
        if (mode == SuiteMode::Random) return false;
        return prime_matrix_count(p, n) <= std::min<std::uint64_t>(budget, kAutoExhaustiveLimit);
    }
};

enum class Verdict { Pass, Fail, Skipped };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "skipped";
    }
}

/// Outcome of one property suite. A failing report carries the matrices that
/// exhibit the violation, named so that the check can be redone from them.
struct LemmaReport {
    std::string lemma_id;
    SuiteConfig config;
    Verdict verdict = Verdict::Pass;
    std::uint64_t checked = 0;
    std::string detail;
    std::vector<std::pair<std::string, ExactMatrix>> counterexample;
    std::optional<std::size_t> step;
    double wall_seconds = 0;

    bool passed() const { return verdict != Verdict::Fail; }
};

/// Collects the outcome of one lemma: counts checks and keeps the first failure.
class ReportBuilder {
public:
    ReportBuilder(std::string id, const SuiteConfig& cfg) : start_(std::chrono::steady_clock::now()) {
        r_.lemma_id = std::move(id);
        r_.config = cfg;
    }

    bool failed() const { return r_.verdict == Verdict::Fail; }

    /// Records one instance; returns false when it is the first failure.
    bool check(bool ok, const std::string& detail = {},
               std::vector<std::pair<std::string, ExactMatrix>> payload = {}) {
        ++r_.checked;
        if (ok || failed()) return ok;
        r_.verdict = Verdict::Fail;
        r_.detail = detail;
        r_.counterexample = std::move(payload);
        return false;
    }

    void skip(const std::string& why) {
        if (r_.verdict == Verdict::Pass) {
            r_.verdict = Verdict::Skipped;
            r_.detail = why;
        }
    }

    void note(const std::string& s) {
        if (r_.verdict == Verdict::Pass) r_.detail = s;
    }

    void set_step(std::size_t s) { r_.step = s; }

    LemmaReport finish() {
        r_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        return std::move(r_);
    }

private:
    LemmaReport r_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace jpow
