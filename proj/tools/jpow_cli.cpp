// jpow: command-line front end for the lemma suite, certificates, witnesses
// and preserver recovery.

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "jpow.hpp"

namespace {

using namespace jpow;

enum Exit : int { kPass = 0, kSuiteFailure = 1, kInputError = 2, kOracleRejection = 3 };

struct Options {
    SuiteConfig cfg;
    std::string mode = "auto";
    std::string input;
    std::string from;  // replay: seed matrix file
    CLI::App* active = nullptr;

    // env values count as given, so both spellings pin the value
    bool given(const std::string& name) const { return active->get_option(name)->count() > 0; }
};

/// Writes to --out when given, else to stdout.
void emit(const Options& o, const std::string& text) {
    if (o.cfg.out.empty()) std::cout << text;
    else write_text(o.cfg.out, text);
}

void check_p(const Options& o, const Field& F) {
    if (o.given("--p") && o.cfg.p != F.p())
        throw CharacteristicMismatch("--p=" + std::to_string(o.cfg.p) + " but the input has p=" + std::to_string(F.p()));
}

int lemma_suite(Options& o) {
    o.cfg.mode = parse_suite_mode(o.mode);
    const auto reports = run_lemma_suite(o.cfg);
    std::ostringstream lines;
    bool ok = true;
    for (const auto& r : reports) {
        lines << to_json(r).dump() << "\n";
        ok = ok && r.passed();
        std::cerr << to_string(r.verdict) << "  " << r.lemma_id << (r.detail.empty() ? "" : "  (" + r.detail + ")") << "\n";
    }
    emit(o, lines.str());
    return ok ? kPass : kSuiteFailure;
}

int certify_cmd(Options& o) {
    const ExactMatrix X = read_matrix_document(read_json_file(o.input), o.cfg.tower_limit);
    check_p(o, X.field());
    const auto c = certify(X, o.cfg.k);
    emit(o, with_header(X.field(), to_json(*c)).dump() + "\n");
    if (eval(c, o.cfg.k) != X) {
        std::cout << "FAIL certificate does not evaluate to the input\n";
        return kSuiteFailure;
    }
    std::cout << "OK depth=" << c->depth() << "\n";
    return kPass;
}

int witness_cmd(Options& o) {
    const ExactMatrix X = read_matrix_document(read_json_file(o.input), o.cfg.tower_limit);
    check_p(o, X.field());
    const auto w = simplicity_witness(X, o.cfg.k, o.cfg.seed);
    Json body{{"k", o.cfg.k}, {"seed", to_json(X)}};
    body["steps"] = to_json(w)["steps"];
    emit(o, with_header(X.field(), body).dump() + "\n");
    const auto res = replay(w, X, o.cfg.k);
    if (!res) {
        std::cout << "FAIL at step " << *res.failed_step << ": " << res.reason << "\n";
        return kSuiteFailure;
    }
    std::cout << "OK steps=" << w.steps.size() << "\n";
    return kPass;
}

int replay_cmd(Options& o) {
    const Json doc = read_json_file(o.input);
    const Field F = field_of_document(doc, o.cfg.tower_limit);
    check_p(o, F);
    unsigned k = o.cfg.k;
    if (!o.given("--k") && doc.contains("k")) k = doc["k"].get<unsigned>();
    ExactMatrix seed;
    if (!o.from.empty()) seed = read_matrix_document(read_json_file(o.from), o.cfg.tower_limit);
    else if (doc.contains("seed")) seed = matrix_from_json(F, doc["seed"]);
    else throw ParseError("witness has no seed matrix; pass --from");
    const auto w = witness_from_json(F, doc, k);
    const auto res = replay(w, seed, k);
    if (!res) {
        std::cout << "FAIL at step " << *res.failed_step << ": " << res.reason << "\n";
        return kSuiteFailure;
    }
    std::cout << "OK steps=" << w.steps.size() << "\n";
    return kPass;
}

OracleSpec load_spec(const Options& o) {
    auto spec = oracle_spec_from_json(read_json_file(o.input), o.cfg.tower_limit);
    check_p(o, spec.field);
    if (o.given("--n") && o.cfg.n != spec.n)
        throw DimensionMismatch("--n=" + std::to_string(o.cfg.n) + " but the spec has n=" + std::to_string(spec.n));
    return spec;
}

Json witness_json(const MatrixPair& w) { return Json{{"A", to_json(w.first)}, {"B", to_json(w.second)}}; }

int canonicalize_cmd(Options& o) {
    const auto spec = load_spec(o);
    const auto f = make_oracle(spec);
    ProbeConfig probes;
    probes.seed = o.cfg.seed;
    try {
        const auto m = canonicalize(f, spec.n, o.cfg.k, probes);
        emit(o, with_header(spec.field, to_json(m)).dump() + "\n");
        return kPass;
    } catch (const NotPreserver& e) {
        emit(o, with_header(spec.field, Json{{"error", "NotPreserver"}, {"detail", e.what()}, {"witness", witness_json(e.witness())}})
                        .dump() +
                    "\n");
        std::cerr << e.what() << "\n";
        return kOracleRejection;
    } catch (const UnrepresentableOmega& e) {
        emit(o, Json{{"error", "UnrepresentableOmega"}, {"detail", e.what()}}.dump() + "\n");
        std::cerr << e.what() << "\n";
        return kOracleRejection;
    } catch (const DegenerateOracle& e) {
        emit(o, Json{{"error", "DegenerateOracle"}, {"condition", e.condition()}, {"detail", e.what()}}.dump() + "\n");
        std::cerr << e.what() << "\n";
        return kOracleRejection;
    }
}

int verify_map_cmd(Options& o) {
    const auto spec = load_spec(o);
    const auto f = make_oracle(spec);
    ProbeConfig probes;
    probes.seed = o.cfg.seed;
    probes.random_pairs = o.cfg.samples;
    const auto r = verify_identity(f, o.cfg.k, probes);
    emit(o, with_header(spec.field, to_json(r)).dump() + "\n");
    return r.pass ? kPass : kOracleRejection;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed Jordan-power products over the algebraic closure of F_p"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool takes_input, const std::string& input_help) {
        sub->add_option("--p", o.cfg.p, "characteristic (odd prime)")->envname("JPOW_P");
        sub->add_option("--n", o.cfg.n, "matrix dimension")->envname("JPOW_N");
        sub->add_option("--k", o.cfg.k, "power in A^k o B")->envname("JPOW_K");
        sub->add_option("--m", o.cfg.m, "potency exponent of the order calculus")->envname("JPOW_M");
        sub->add_option("--seed", o.cfg.seed, "random seed")->envname("JPOW_SEED");
        sub->add_option("--samples", o.cfg.samples, "sample count")->envname("JPOW_SAMPLES");
        sub->add_option("--mode", o.mode, "auto, exhaustive or random")->envname("JPOW_MODE");
        sub->add_option("--tower-limit", o.cfg.tower_limit, "largest extension degree")->envname("JPOW_TOWER_LIMIT");
        sub->add_option("--out", o.cfg.out, "output file (default stdout)")->envname("JPOW_OUT");
        if (takes_input) sub->add_option("input", o.input, input_help)->required();
    };

    auto* suite = app.add_subcommand("lemma-suite", "run every lemma check, one JSON report per line");
    common(suite, false, "");
    auto* cert = app.add_subcommand("certify", "build and check a generation certificate");
    common(cert, true, "matrix JSON file");
    auto* wit = app.add_subcommand("witness", "build a derivation chain from a nonzero seed to I");
    common(wit, true, "matrix JSON file");
    auto* rep = app.add_subcommand("replay", "recheck a witness file");
    common(rep, true, "witness JSON file");
    rep->add_option("--from", o.from, "seed matrix file (default: the witness's own seed)");
    auto* canon = app.add_subcommand("canonicalize", "recover the canonical form of an oracle spec");
    common(canon, true, "oracle spec JSON file");
    auto* verify = app.add_subcommand("verify-map", "test the mixed identity on an oracle spec");
    common(verify, true, "oracle spec JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kInputError;
    }

    o.active = app.get_subcommands().front();
    try {
        o.cfg.mode = parse_suite_mode(o.mode);
        FieldConfig{o.cfg.p, o.cfg.tower_limit}.validate();
        if (o.cfg.k < 1) throw ConfigError("k must be positive");
        if (*suite) return lemma_suite(o);
        if (*cert) return certify_cmd(o);
        if (*wit) return witness_cmd(o);
        if (*rep) return replay_cmd(o);
        if (*canon) return canonicalize_cmd(o);
        if (*verify) return verify_map_cmd(o);
    } catch (const NotPreserver& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOracleRejection;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
