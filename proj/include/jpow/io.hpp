#pragma once

// JSON forms of every value the command-line tool reads or writes, and the
// oracle spec language used to describe maps without code.

#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "jpow/generate.hpp"
#include "jpow/preserver.hpp"
#include "jpow/report.hpp"

namespace jpow {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
    return j.at(key);
}

template <class T>
T read_as(const Json& j, const char* key) {
    const Json& v = require(j, key);
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ParseError(std::string("key '") + key + "' has the wrong type");
    }
}

inline std::uint64_t read_uint(const Json& j, const char* key) {
    const Json& v = require(j, key);
    if (!v.is_number_unsigned()) throw ParseError(std::string("key '") + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

/// Degrees of every serialized element below j.
inline void collect_degrees(const Json& j, std::set<unsigned>& out) {
    if (j.is_object()) {
        if (j.size() == 2 && j.contains("m") && j.contains("c") && j["m"].is_number_unsigned()) {
            out.insert(j["m"].get<unsigned>());
            return;
        }
        for (const auto& [key, v] : j.items()) collect_degrees(v, out);
    } else if (j.is_array()) {
        for (const auto& v : j) collect_degrees(v, out);
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elements and matrices

inline Json to_json(const ClosureElement& a) {
    Json c = Json::array();
    for (auto v : a.coeffs()) c.push_back(v);
    return Json{{"m", a.degree()}, {"c", std::move(c)}};
}

/// Accepts {"m": d, "c": [...]} or a bare integer for a prime-field element.
inline ClosureElement element_from_json(const Field& F, const Json& j) {
    if (j.is_number_integer()) return F.from_int(j.get<std::int64_t>());
    const auto m = static_cast<unsigned>(detail::read_uint(j, "m"));
    const Json& c = detail::require(j, "c");
    if (!c.is_array()) throw ParseError("element coefficients must be an array");
    std::vector<std::uint32_t> coeffs;
    for (const auto& v : c) {
        if (!v.is_number_unsigned()) throw ParseError("element coefficients must be non-negative integers");
        auto x = v.get<std::uint64_t>();
        if (x >= F.p()) throw ParseError("coefficient not reduced mod p");
        coeffs.push_back(static_cast<std::uint32_t>(x));
    }
    return F.from_coeffs(m, coeffs);
}

inline Json to_json(const ExactMatrix& X) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < X.n(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < X.n(); ++j) row.push_back(to_json(X(i, j)));
        rows.push_back(std::move(row));
    }
    return Json{{"p", X.field().p()}, {"n", X.n()}, {"entries", std::move(rows)}};
}

inline ExactMatrix matrix_from_json(const Field& F, const Json& j) {
    const auto p = detail::read_uint(j, "p");
    if (p != F.p()) throw CharacteristicMismatch("matrix has p=" + std::to_string(p) + ", expected " + std::to_string(F.p()));
    const auto n = detail::read_uint(j, "n");
    if (n < 1 || n > 16) throw ParseError("matrix dimension must be between 1 and 16");
    const Json& rows = detail::require(j, "entries");
    if (!rows.is_array() || rows.size() != n) throw ParseError("matrix must have n rows");
    ExactMatrix X(F, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i].is_array() || rows[i].size() != n) throw ParseError("matrix row " + std::to_string(i) + " must have n entries");
        for (std::size_t k = 0; k < n; ++k) X(i, k) = element_from_json(F, rows[i][k]);
    }
    return X;
}

// ---------------------------------------------------------------------------
// Field header

/// {"p": p, "defining_polynomials": {"d": [...]}} for every degree above 1 used in body.
inline Json field_header(const Field& F, const Json& body) {
    std::set<unsigned> degrees;
    detail::collect_degrees(body, degrees);
    Json polys = Json::object();
    for (unsigned d : degrees)
        if (d > 1) polys[std::to_string(d)] = F.defining_polynomial(d);
    return Json{{"p", F.p()}, {"defining_polynomials", std::move(polys)}};
}

/// The header must agree with this build's tower, or coordinates would mean something else.
inline void check_field_header(const Field& F, const Json& header) {
    if (detail::read_uint(header, "p") != F.p()) throw CharacteristicMismatch("field header has a different p");
    if (!header.contains("defining_polynomials")) return;
    const Json& polys = header["defining_polynomials"];
    if (!polys.is_object()) throw ParseError("defining_polynomials must be an object");
    for (const auto& [key, v] : polys.items()) {
        unsigned d = 0;
        try {
            d = static_cast<unsigned>(std::stoul(key));
        } catch (const std::exception&) {
            throw ParseError("bad degree key '" + key + "'");
        }
        if (d < 1 || d > F.tower_limit()) throw TowerLimitExceeded(d, F.tower_limit());
        if (v != Json(F.defining_polynomial(d)))
            throw ParseError("defining polynomial of degree " + key + " differs from this tower");
    }
}

/// Reads p (from "field" or the body's first matrix) and builds the field.
inline Field field_of_document(const Json& doc, unsigned tower_limit) {
    std::uint64_t p = 0;
    if (doc.is_object() && doc.contains("field")) p = detail::read_uint(doc["field"], "p");
    else if (doc.is_object() && doc.contains("p")) p = detail::read_uint(doc, "p");
    else throw ParseError("document does not name its characteristic");
    if (p > UINT32_MAX) throw ConfigError("p out of range");
    Field F(static_cast<std::uint32_t>(p), tower_limit);
    if (doc.contains("field")) check_field_header(F, doc["field"]);
    return F;
}

/// Attaches the field header in front of the body's keys.
inline Json with_header(const Field& F, const Json& body) {
    Json doc{{"field", field_header(F, body)}};
    for (const auto& [key, v] : body.items()) doc[key] = v;
    return doc;
}

// ---------------------------------------------------------------------------
// Certificates and witnesses

inline Json to_json(const GenerationCertificate& c) {
    if (c.is_leaf()) return Json{{"kind", "leaf"}, {"base", to_json(c.base())}};
    return Json{{"kind", "node"}, {"left", to_json(*c.left())}, {"right", to_json(*c.right())}};
}

inline CertPtr certificate_from_json(const Field& F, const Json& j) {
    const auto kind = detail::read_as<std::string>(j, "kind");
    if (kind == "leaf") return GenerationCertificate::leaf(matrix_from_json(F, detail::require(j, "base")));
    if (kind == "node")
        return GenerationCertificate::node(certificate_from_json(F, detail::require(j, "left")),
                                           certificate_from_json(F, detail::require(j, "right")));
    throw ParseError("unknown certificate kind '" + kind + "'");
}

inline Json to_json(const SimplicityWitness& w) {
    Json steps = Json::array();
    for (const auto& s : w.steps)
        steps.push_back(Json{{"p", to_json(s.p)},
                             {"q", to_json(s.q)},
                             {"which_is_prior", s.prior_is_left ? "left" : "right"},
                             {"result", to_json(s.result)},
                             {"power", to_json(s.power)}});
    return Json{{"steps", std::move(steps)}};
}

/// A step without "power" gets p^k recomputed, which needs k.
inline SimplicityWitness witness_from_json(const Field& F, const Json& j, std::optional<unsigned> k = std::nullopt) {
    const Json& steps = detail::require(j, "steps");
    if (!steps.is_array()) throw ParseError("steps must be an array");
    SimplicityWitness w;
    for (const auto& s : steps) {
        WitnessStep st;
        st.p = matrix_from_json(F, detail::require(s, "p"));
        st.q = matrix_from_json(F, detail::require(s, "q"));
        const auto which = detail::read_as<std::string>(s, "which_is_prior");
        if (which != "left" && which != "right") throw ParseError("which_is_prior must be 'left' or 'right'");
        st.prior_is_left = which == "left";
        st.result = matrix_from_json(F, detail::require(s, "result"));
        if (s.contains("power")) st.power = matrix_from_json(F, s["power"]);
        else if (k) st.power = st.p.pow(*k);
        else throw ParseError("step lacks 'power' and no k was given");
        w.steps.push_back(std::move(st));
    }
    return w;
}

// ---------------------------------------------------------------------------
// Structured maps and reports

inline Json to_json(const StructuredMap& m) {
    if (m.is_constant()) return Json{{"variant", "constant"}, {"value", to_json(m.as_constant().value)}};
    const auto& c = m.as_canonical();
    return Json{{"variant", "canonical"},
                {"epsilon", to_json(c.epsilon)},
                {"T", to_json(c.T)},
                {"e", c.e},
                {"transpose", c.transpose}};
}

inline StructuredMap structured_map_from_json(const Field& F, const Json& j, unsigned k) {
    const auto variant = detail::read_as<std::string>(j, "variant");
    if (variant == "constant") return StructuredMap::constant(matrix_from_json(F, detail::require(j, "value")), k);
    if (variant == "canonical")
        return StructuredMap::canonical(element_from_json(F, detail::require(j, "epsilon")),
                                        matrix_from_json(F, detail::require(j, "T")),
                                        static_cast<unsigned>(detail::read_uint(j, "e")),
                                        detail::read_as<bool>(j, "transpose"), k);
    throw ParseError("unknown map variant '" + variant + "'");
}

inline Json to_json(const VerificationReport& r) {
    Json w = nullptr;
    if (r.witness) w = Json{{"A", to_json(r.witness->first)}, {"B", to_json(r.witness->second)}};
    return Json{{"verdict", r.pass ? "pass" : "fail"},
                {"samples_checked", r.samples_checked},
                {"query_count", r.query_count},
                {"witness", std::move(w)}};
}

inline VerificationReport verification_report_from_json(const Field& F, const Json& j) {
    VerificationReport r;
    const auto v = detail::read_as<std::string>(j, "verdict");
    if (v != "pass" && v != "fail") throw ParseError("verdict must be 'pass' or 'fail'");
    r.pass = v == "pass";
    r.samples_checked = detail::read_uint(j, "samples_checked");
    r.query_count = detail::read_uint(j, "query_count");
    const Json& w = detail::require(j, "witness");
    if (!w.is_null())
        r.witness = MatrixPair{matrix_from_json(F, detail::require(w, "A")), matrix_from_json(F, detail::require(w, "B"))};
    return r;
}

inline Json to_json(const SuiteConfig& c) {
    return Json{{"p", c.p}, {"n", c.n}, {"k", c.k}, {"m", c.m}, {"seed", c.seed}, {"samples", c.samples},
                {"mode", to_string(c.mode)}, {"tower_limit", c.tower_limit}};
}

inline Json to_json(const LemmaReport& r) {
    Json ce = Json::array();
    for (const auto& [name, X] : r.counterexample) ce.push_back(Json{{"name", name}, {"matrix", to_json(X)}});
    Json step = nullptr;
    if (r.step) step = *r.step;
    return Json{{"lemma_id", r.lemma_id},
                {"config", to_json(r.config)},
                {"verdict", to_string(r.verdict)},
                {"checked", r.checked},
                {"detail", r.detail},
                {"counterexample", std::move(ce)},
                {"step", std::move(step)},
                {"wall_seconds", r.wall_seconds}};
}

inline LemmaReport lemma_report_from_json(const Json& j) {
    LemmaReport r;
    r.lemma_id = detail::read_as<std::string>(j, "lemma_id");
    const Json& c = detail::require(j, "config");
    r.config.p = static_cast<std::uint32_t>(detail::read_uint(c, "p"));
    r.config.n = detail::read_uint(c, "n");
    r.config.k = static_cast<unsigned>(detail::read_uint(c, "k"));
    r.config.m = static_cast<unsigned>(detail::read_uint(c, "m"));
    r.config.seed = detail::read_uint(c, "seed");
    r.config.samples = detail::read_uint(c, "samples");
    r.config.mode = parse_suite_mode(detail::read_as<std::string>(c, "mode"));
    r.config.tower_limit = static_cast<unsigned>(detail::read_uint(c, "tower_limit"));
    const auto v = detail::read_as<std::string>(j, "verdict");
    if (v == "pass") r.verdict = Verdict::Pass;
    else if (v == "fail") r.verdict = Verdict::Fail;
    else if (v == "skipped") r.verdict = Verdict::Skipped;
    else throw ParseError("unknown verdict '" + v + "'");
    r.checked = detail::read_uint(j, "checked");
    r.detail = detail::read_as<std::string>(j, "detail");
    const Field F(r.config.p, r.config.tower_limit);
    for (const auto& e : detail::require(j, "counterexample"))
        r.counterexample.emplace_back(detail::read_as<std::string>(e, "name"), matrix_from_json(F, detail::require(e, "matrix")));
    const Json& step = detail::require(j, "step");
    if (!step.is_null()) r.step = step.get<std::size_t>();
    r.wall_seconds = detail::read_as<double>(j, "wall_seconds");
    return r;
}

// ---------------------------------------------------------------------------
// Oracle specs
//
// {"p": 5, "n": 3, "map": M} where M is one of
//   {"kind": "identity"} | {"kind": "transpose"} | {"kind": "zero"}
//   {"kind": "constant", "value": Matrix}
//   {"kind": "canonical", "epsilon": Elt, "T": Matrix, "e": int, "transpose": bool}
//   {"kind": "power", "exponent": j}                         X -> X^j
//   {"kind": "scale", "factor": Elt, "inner": M}             X -> c inner(X)
//   {"kind": "shift", "offset": Matrix, "inner": M}          X -> inner(X) + offset
//   {"kind": "entrywise", "function": F, "inner": M}         f applied to each entry of inner(X)
//   {"kind": "compose", "outer": M, "inner": M}
// with F one of "square", "cube", "inverse" (0 -> 0), "negate", "frobenius" (needs "e").
// "inner" defaults to the identity. Canonical parameters are not validated here:
// a spec may describe a map that is not a preserver.

namespace detail {

inline MapOracle::Fn map_from_spec(const Field& F, std::size_t n, const Json& j, std::string& name) {
    using Fn = MapOracle::Fn;
    const auto kind = read_as<std::string>(j, "kind");
    auto inner = [&](std::string& nm) -> Fn {
        if (!j.contains("inner")) {
            nm = "X";
            return [](const ExactMatrix& X) { return X; };
        }
        return map_from_spec(F, n, j["inner"], nm);
    };
    auto check_n = [&](const ExactMatrix& M) {
        if (M.n() != n) throw DimensionMismatch("spec matrix has the wrong dimension");
        return M;
    };
    if (kind == "identity") {
        name = "X";
        return [](const ExactMatrix& X) { return X; };
    }
    if (kind == "transpose") {
        name = "X^t";
        return [](const ExactMatrix& X) { return X.transpose(); };
    }
    if (kind == "zero") {
        name = "0";
        return [F, n](const ExactMatrix&) { return ExactMatrix::zero(F, n); };
    }
    if (kind == "constant") {
        auto C = check_n(matrix_from_json(F, require(j, "value")));
        name = "const";
        return [C](const ExactMatrix&) { return C; };
    }
    if (kind == "canonical") {
        auto eps = element_from_json(F, require(j, "epsilon"));
        auto T = check_n(matrix_from_json(F, require(j, "T")));
        auto T_inv = inverse(T);
        auto e = static_cast<unsigned>(read_uint(j, "e"));
        bool tr = read_as<bool>(j, "transpose");
        name = "canonical";
        return [=](const ExactMatrix& X) {
            ExactMatrix W = frobenius(X, e);
            if (tr) W = W.transpose();
            return eps * (T * W * T_inv);
        };
    }
    if (kind == "power") {
        auto e = read_uint(j, "exponent");
        name = "X^" + std::to_string(e);
        return [e](const ExactMatrix& X) { return X.pow(e); };
    }
    if (kind == "scale") {
        auto c = element_from_json(F, require(j, "factor"));
        std::string nm;
        Fn g = inner(nm);
        name = c.to_string() + "*(" + nm + ")";
        return [c, g](const ExactMatrix& X) { return c * g(X); };
    }
    if (kind == "shift") {
        auto C = check_n(matrix_from_json(F, require(j, "offset")));
        std::string nm;
        Fn g = inner(nm);
        name = nm + "+offset";
        return [C, g](const ExactMatrix& X) { return g(X) + C; };
    }
    if (kind == "entrywise") {
        const auto fn = read_as<std::string>(j, "function");
        std::function<ClosureElement(const ClosureElement&)> f;
        if (fn == "square") f = [](const ClosureElement& a) { return a * a; };
        else if (fn == "cube") f = [](const ClosureElement& a) { return a * a * a; };
        else if (fn == "negate") f = [](const ClosureElement& a) { return -a; };
        else if (fn == "inverse") f = [](const ClosureElement& a) { return a.is_zero() ? a : a.inverse(); };
        else if (fn == "frobenius") {
            auto e = static_cast<unsigned>(read_uint(j, "e"));
            f = [e](const ClosureElement& a) { return a.frobenius(e); };
        } else
            throw ParseError("unknown entrywise function '" + fn + "'");
        std::string nm;
        Fn g = inner(nm);
        name = fn + "[" + nm + "]";
        return [f, g](const ExactMatrix& X) { return g(X).map(f); };
    }
    if (kind == "compose") {
        std::string a, b;
        Fn outer = map_from_spec(F, n, require(j, "outer"), a);
        Fn in = map_from_spec(F, n, require(j, "inner"), b);
        name = a + " . " + b;
        return [outer, in](const ExactMatrix& X) { return outer(in(X)); };
    }
    throw ParseError("unknown map kind '" + kind + "'");
}

}  // namespace detail

struct OracleSpec {
    Field field;
    std::size_t n;
    Json map;
};

inline OracleSpec oracle_spec_from_json(const Json& j, unsigned tower_limit = kDefaultTowerLimit) {
    Field F = field_of_document(j, tower_limit);
    const auto n = detail::read_uint(j, "n");
    if (n < 1 || n > 16) throw ParseError("n must be between 1 and 16");
    return {F, n, detail::require(j, "map")};
}

inline MapOracle make_oracle(const OracleSpec& s) {
    std::string name;
    auto fn = detail::map_from_spec(s.field, s.n, s.map, name);
    return MapOracle(s.field, s.n, std::move(fn), name);
}

/// Spec describing a structured map, so that canonicalizer output can be fed back in.
inline Json oracle_spec_of(const StructuredMap& m) {
    Json map;
    if (m.is_constant()) map = Json{{"kind", "constant"}, {"value", to_json(m.as_constant().value)}};
    else {
        map = to_json(m);
        map.erase("variant");
        Json out{{"kind", "canonical"}};
        for (const auto& [key, v] : map.items()) out[key] = v;
        map = std::move(out);
    }
    return with_header(m.field(), Json{{"p", m.p()}, {"n", m.n()}, {"map", std::move(map)}});
}

// ---------------------------------------------------------------------------
// Files

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

/// A matrix file is a Matrix object, optionally wrapped as {"field": ..., "matrix": Matrix}.
inline ExactMatrix read_matrix_document(const Json& doc, unsigned tower_limit) {
    if (doc.is_object() && doc.contains("matrix")) {
        Field F = field_of_document(doc.contains("field") ? doc : doc["matrix"], tower_limit);
        return matrix_from_json(F, doc["matrix"]);
    }
    Field F = field_of_document(doc, tower_limit);
    return matrix_from_json(F, doc);
}

inline Json matrix_document(const ExactMatrix& X) { return with_header(X.field(), Json{{"matrix", to_json(X)}}); }

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

}  // namespace jpow
