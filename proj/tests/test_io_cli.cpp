#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "jpow.hpp"

using namespace jpow;
namespace fs = std::filesystem;

namespace {

template <class T, class Parse>
void round_trips(const T& value, const Json& j, Parse parse) {
    const std::string text = j.dump();
    const Json back = to_json(parse(parse_json(text)));
    CHECK(back.dump() == text);
}

fs::path scratch() {
    auto d = fs::temp_directory_path() / "jpow_cli_test";
    fs::create_directories(d);
    return d;
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

/// Runs the CLI with stdout captured in `captured`; returns the exit status.
int cli(const std::string& args, std::string* captured = nullptr) {
    const auto out = scratch() / "stdout.txt";
    const std::string cmd = std::string(JPOW_CLI) + " " + args + " > " + out.string() + " 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    if (captured) *captured = slurp(out);
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST_CASE("element and matrix JSON round-trip exactly") {
    Rng rng(11);
    for (std::uint32_t p : {3u, 5u, 7u}) {
        Field F(p);
        for (unsigned d = 1; d <= 6; ++d)
            for (int t = 0; t < 20; ++t) {
                auto a = F.random(rng, d);
                auto j = to_json(a);
                CHECK(element_from_json(F, parse_json(j.dump())) == a);
                CHECK(to_json(element_from_json(F, j)).dump() == j.dump());
            }
        for (std::size_t n = 1; n <= 4; ++n)
            for (unsigned d = 1; d <= 3; ++d) {
                auto X = random_matrix(F, n, rng, d);
                auto j = to_json(X);
                auto Y = matrix_from_json(F, parse_json(j.dump()));
                CHECK(Y == X);
                CHECK(to_json(Y).dump() == j.dump());
            }
    }
}

TEST_CASE("element JSON shape") {
    Field F(5);
    CHECK(to_json(F.from_int(3)).dump() == R"({"m":1,"c":[3]})");
    auto g = F.generator(2);
    auto j = to_json(g);
    CHECK(j["m"] == 2);
    CHECK(j["c"].size() == 2);
    // a non-minimal encoding is accepted and normalized
    CHECK(element_from_json(F, parse_json(R"({"m":2,"c":[4,0]})")) == F.from_int(4));
    CHECK(element_from_json(F, parse_json("7")) == F.from_int(2));
    CHECK_THROWS_AS(element_from_json(F, parse_json(R"({"m":2,"c":[5,0]})")), ParseError);
    CHECK_THROWS_AS(element_from_json(F, parse_json(R"({"m":2,"c":[1]})")), ParseError);
    CHECK_THROWS_AS(element_from_json(F, parse_json(R"({"c":[1]})")), ParseError);
}

TEST_CASE("malformed matrices are rejected") {
    Field F(5);
    CHECK_THROWS_AS(matrix_from_json(F, parse_json(R"({"p":3,"n":1,"entries":[[1]]})")), CharacteristicMismatch);
    CHECK_THROWS_AS(matrix_from_json(F, parse_json(R"({"p":5,"n":2,"entries":[[1,0]]})")), ParseError);
    CHECK_THROWS_AS(matrix_from_json(F, parse_json(R"({"p":5,"n":2,"entries":[[1,0],[0]]})")), ParseError);
    CHECK_THROWS_AS(matrix_from_json(F, parse_json(R"({"p":5,"n":0,"entries":[]})")), ParseError);
    CHECK_THROWS_AS(parse_json("{"), ParseError);
}

TEST_CASE("field header pins the defining polynomials") {
    Field F(3);
    Rng rng(2);
    auto X = random_matrix(F, 2, rng, 4);
    const Json doc = matrix_document(X);
    const auto& polys = doc["field"]["defining_polynomials"];
    for (const auto& [d, poly] : polys.items()) {
        // monic of the stated degree
        CHECK(poly.size() == std::stoul(d) + 1);
        CHECK(poly.back() == 1);
    }
    CHECK(read_matrix_document(doc, kDefaultTowerLimit) == X);

    Json tampered = doc;
    tampered["field"]["defining_polynomials"]["2"] = Json::array({1, 1, 1});
    CHECK_THROWS_AS(read_matrix_document(tampered, kDefaultTowerLimit), ParseError);
    Json deep = doc;
    deep["field"]["defining_polynomials"]["30"] = Json::array({1});
    CHECK_THROWS_AS(read_matrix_document(deep, kDefaultTowerLimit), TowerLimitExceeded);
}

TEST_CASE("certificate JSON round-trips and still evaluates") {
    Rng rng(5);
    for (std::uint32_t p : {3u, 5u}) {
        Field F(p);
        for (unsigned k : {1u, 2u, 3u}) {
            auto X = random_matrix(F, 3, rng);
            auto c = certify(X, k);
            auto j = with_header(F, to_json(*c));
            auto back = certificate_from_json(field_of_document(j, kDefaultTowerLimit), parse_json(j.dump()));
            CHECK(eval(back, k) == X);
            CHECK(back->depth() == c->depth());
            CHECK(with_header(F, to_json(*back)).dump() == j.dump());
        }
    }
    Field F(5);
    CHECK_THROWS_AS(certificate_from_json(F, parse_json(R"({"kind":"branch"})")), ParseError);
}

TEST_CASE("witness JSON round-trips and replays") {
    Rng rng(6);
    Field F(5);
    for (unsigned k : {2u, 3u}) {
        auto X = random_nonzero_matrix(F, 3, rng);
        auto w = simplicity_witness(X, k, 1);
        auto j = to_json(w);
        for (const auto& s : j["steps"]) {
            CHECK((s["which_is_prior"] == "left" || s["which_is_prior"] == "right"));
            CHECK(s.contains("p"));
            CHECK(s.contains("q"));
            CHECK(s.contains("result"));
        }
        auto back = witness_from_json(F, parse_json(j.dump()));
        CHECK(replay(back, X, k));
        CHECK(to_json(back).dump() == j.dump());

        // without the recorded powers the steps are rebuilt from k
        Json bare = j;
        for (auto& s : bare["steps"]) s.erase("power");
        CHECK(replay(witness_from_json(F, bare, k), X, k));
        CHECK_THROWS_AS(witness_from_json(F, bare), ParseError);
    }
}

TEST_CASE("structured map JSON round-trips") {
    Rng rng(7);
    for (std::uint32_t p : {3u, 5u}) {
        Field F(p);
        for (unsigned k : {1u, 2u, 3u}) {
            auto m = random_canonical_map(F, 3, k, rng);
            auto j = to_json(m);
            auto back = structured_map_from_json(F, parse_json(j.dump()), k);
            CHECK(to_json(back).dump() == j.dump());
            CHECK(equivalent(m, back, 20));
        }
    }
    Field F(3);
    auto c = StructuredMap::constant(ExactMatrix::unit(F, 2, 0, 0), 2);
    auto j = to_json(c);
    CHECK(j["variant"] == "constant");
    CHECK(structured_map_from_json(F, j, 2).is_constant());
    CHECK_THROWS_AS(structured_map_from_json(F, parse_json(R"({"variant":"affine"})"), 2), ParseError);
}

TEST_CASE("reports round-trip and counterexamples re-verify from JSON") {
    Field F(5);
    SuiteConfig cfg;
    cfg.p = 5;
    cfg.n = 2;
    cfg.samples = 30;
    // the squaring map preserves (k+1)-th powers but not the triple product
    MapOracle sq(F, 2, [](const ExactMatrix& X) { return X * X; }, "square");
    bool saw_failure = false;
    for (const auto& rep : check_section3_properties(sq, 2, cfg)) {
        const std::string text = to_json(rep).dump();
        const auto back = lemma_report_from_json(parse_json(text));
        CHECK(to_json(back).dump() == text);
        if (rep.lemma_id != "s3.triple_product" || rep.verdict != Verdict::Fail) continue;
        saw_failure = true;
        std::map<std::string, ExactMatrix> named(back.counterexample.begin(), back.counterexample.end());
        REQUIRE(named.count("P"));
        REQUIRE(named.count("X"));
        const auto &P = named.at("P"), &X = named.at("X");
        CHECK(sq(P * X.pow(2) * P) != sq(P) * sq(X).pow(2) * sq(P));
    }
    CHECK(saw_failure);

    VerificationReport v;
    v.pass = false;
    v.samples_checked = 4;
    v.query_count = 9;
    v.witness = MatrixPair{ExactMatrix::unit(F, 2, 0, 1), ExactMatrix::identity(F, 2)};
    const std::string text = to_json(v).dump();
    CHECK(to_json(verification_report_from_json(F, parse_json(text))).dump() == text);
}

TEST_CASE("oracle specs build the described maps") {
    Field F(5);
    Rng rng(8);
    auto spec = [&](const std::string& map) {
        return make_oracle(oracle_spec_from_json(parse_json(R"({"p":5,"n":2,"map":)" + map + "}")));
    };
    auto X = random_matrix(F, 2, rng, 2);
    CHECK(spec(R"({"kind":"identity"})")(X) == X);
    CHECK(spec(R"({"kind":"transpose"})")(X) == X.transpose());
    CHECK(spec(R"({"kind":"zero"})")(X).is_zero());
    CHECK(spec(R"({"kind":"power","exponent":3})")(X) == X * X * X);
    CHECK(spec(R"({"kind":"scale","factor":2})")(X) == F.from_int(2) * X);
    CHECK(spec(R"({"kind":"shift","offset":{"p":5,"n":2,"entries":[[1,0],[0,0]]}})")(X) ==
          X + ExactMatrix::unit(F, 2, 0, 0));
    CHECK(spec(R"({"kind":"entrywise","function":"frobenius","e":1})")(X) == frobenius(X, 1));
    CHECK(spec(R"({"kind":"entrywise","function":"negate","inner":{"kind":"transpose"}})")(X) == -X.transpose());
    CHECK(spec(R"({"kind":"compose","outer":{"kind":"transpose"},"inner":{"kind":"power","exponent":2}})")(X) ==
          (X * X).transpose());
    auto inv = spec(R"({"kind":"entrywise","function":"inverse"})")(X);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK((X(i, j).is_zero() ? inv(i, j).is_zero() : (inv(i, j) * X(i, j)).is_one()));

    auto m = random_canonical_map(F, 2, 2, rng);
    auto f = make_oracle(oracle_spec_from_json(oracle_spec_of(m)));
    CHECK(f(X) == m(X));

    CHECK_THROWS_AS(spec(R"({"kind":"rotate"})"), ParseError);
    CHECK_THROWS_AS(spec(R"({"kind":"entrywise","function":"sine"})"), ParseError);
    CHECK_THROWS_AS(spec(R"({"kind":"constant","value":{"p":5,"n":3,"entries":[[0,0,0],[0,0,0],[0,0,0]]}})"),
                    DimensionMismatch);
}

TEST_CASE("cli: certify and witness") {
    const auto d = scratch();
    put(d / "e12.json", R"({"p":5,"n":2,"entries":[[0,1],[0,0]]})");
    put(d / "zero.json", R"({"p":5,"n":2,"entries":[[0,0],[0,0]]})");
    put(d / "id.json", R"({"p":5,"n":3,"entries":[[1,0,0],[0,1,0],[0,0,1]]})");
    put(d / "bad.json", R"({"p":5,"n":2,"entries":[[0,1])");
    std::string out;

    CHECK(cli("certify " + (d / "id.json").string() + " --k 2 --out " + (d / "c.json").string(), &out) == 0);
    CHECK(out == "OK depth=0\n");
    CHECK(parse_json(slurp(d / "c.json"))["kind"] == "leaf");

    Rng rng(9);
    Field F(5);
    auto X = random_matrix(F, 3, rng);
    put(d / "x.json", matrix_document(X).dump());
    CHECK(cli("certify " + (d / "x.json").string() + " --k 3 --out " + (d / "cx.json").string(), &out) == 0);
    CHECK(out.rfind("OK depth=", 0) == 0);
    {
        const Json doc = parse_json(slurp(d / "cx.json"));
        CHECK(eval(certificate_from_json(field_of_document(doc, kDefaultTowerLimit), doc), 3) == X);
    }
    CHECK(cli("certify " + (d / "bad.json").string()) == 2);
    CHECK(cli("certify " + (d / "missing.json").string()) == 2);
    CHECK(cli("certify " + (d / "e12.json").string() + " --p 3") == 2);

    CHECK(cli("witness " + (d / "zero.json").string()) == 2);
    CHECK(cli("witness " + (d / "e12.json").string() + " --k 2 --out " + (d / "w.json").string(), &out) == 0);
    CHECK(out.rfind("OK steps=", 0) == 0);
    CHECK(cli("replay " + (d / "w.json").string(), &out) == 0);

    // tamper with one recorded result
    Json w = parse_json(slurp(d / "w.json"));
    REQUIRE(w["steps"].size() >= 2);
    auto& entry = w["steps"][1]["result"]["entries"][0][0];
    entry["c"][0] = (entry["c"][0].get<unsigned>() + 1) % 5;
    put(d / "t.json", w.dump());
    CHECK(cli("replay " + (d / "t.json").string(), &out) == 1);
    CHECK(out.rfind("FAIL at step 1", 0) == 0);
}

TEST_CASE("cli: canonicalize and verify-map") {
    const auto d = scratch();
    std::string out;
    put(d / "identity.json", R"({"p":5,"n":3,"map":{"kind":"identity"}})");
    put(d / "transpose.json", R"({"p":5,"n":3,"map":{"kind":"transpose"}})");
    put(d / "shift.json",
        R"({"p":5,"n":3,"map":{"kind":"shift","offset":{"p":5,"n":3,"entries":[[1,0,0],[0,0,0],[0,0,0]]}}})");
    put(d / "const.json",
        R"({"p":5,"n":3,"map":{"kind":"constant","value":{"p":5,"n":3,"entries":[[1,0,0],[0,0,0],[0,0,0]]}}})");

    CHECK(cli("verify-map " + (d / "identity.json").string() + " --k 2", &out) == 0);
    CHECK(parse_json(out)["verdict"] == "pass");
    CHECK(cli("verify-map " + (d / "transpose.json").string() + " --k 3", &out) == 0);
    CHECK(cli("verify-map " + (d / "shift.json").string() + " --k 2", &out) == 3);
    {
        Field F(5);
        const Json rep = parse_json(out);
        CHECK(rep["verdict"] == "fail");
        const auto v = verification_report_from_json(F, rep);
        REQUIRE(v.witness);
        const auto f = make_oracle(oracle_spec_from_json(parse_json(slurp(d / "shift.json"))));
        CHECK_FALSE(identity_holds(f, v.witness->first, v.witness->second, 2));
    }

    CHECK(cli("canonicalize " + (d / "const.json").string() + " --k 2", &out) == 0);
    CHECK(parse_json(out)["variant"] == "constant");
    CHECK(cli("canonicalize " + (d / "shift.json").string() + " --k 2", &out) == 3);
    CHECK(parse_json(out)["error"] == "NotPreserver");
    CHECK(cli("canonicalize " + (d / "identity.json").string() + " --n 2") == 2);

    // a built-in canonical map survives the trip through the CLI
    Rng rng(10);
    Field F(5);
    const auto m = random_canonical_map(F, 3, 2, rng);
    put(d / "canon.json", oracle_spec_of(m).dump());
    CHECK(cli("canonicalize " + (d / "canon.json").string() + " --k 2", &out) == 0);
    const Json got = parse_json(out);
    CHECK(equivalent(m, structured_map_from_json(field_of_document(got, kDefaultTowerLimit), got, 2), 100));
}

TEST_CASE("cli: lemma suite and configuration errors") {
    const auto d = scratch();
    std::string out;
    CHECK(cli("lemma-suite --p 2") == 2);
    CHECK(cli("lemma-suite --mode sometimes") == 2);
    CHECK(cli("lemma-suite --n 4 --mode exhaustive") == 2);
    CHECK(cli("frobnicate") == 2);

    CHECK(cli("lemma-suite --p 3 --n 2 --m 4 --samples 20 --out " + (d / "a.jsonl").string()) == 0);
    CHECK(cli("lemma-suite --p 3 --n 2 --m 4 --samples 20 --out " + (d / "b.jsonl").string()) == 0);
    std::ifstream a(d / "a.jsonl"), b(d / "b.jsonl");
    std::string la, lb, prev;
    std::size_t lines = 0;
    bool saw_witness = false;
    while (std::getline(a, la)) {
        REQUIRE(std::getline(b, lb));
        Json ja = parse_json(la), jb = parse_json(lb);
        ja.erase("wall_seconds");
        jb.erase("wall_seconds");
        CHECK(ja.dump() == jb.dump());
        CHECK(ja["verdict"] != "fail");
        CHECK(ja["lemma_id"].get<std::string>() > prev);
        prev = ja["lemma_id"].get<std::string>();
        if (prev == "potent.diagonalizability") {
            Field F(3);
            REQUIRE(ja["counterexample"].size() == 1);
            CHECK(matrix_from_json(F, ja["counterexample"][0]["matrix"]) == ExactMatrix::from_ints(F, {{1, 1}, {0, 1}}));
            saw_witness = true;
        }
        ++lines;
    }
    CHECK(lines > 20);
    CHECK(saw_witness);

    // environment overrides reach the same configuration
    const std::string env = "JPOW_P=3 JPOW_N=2 JPOW_M=4 JPOW_SAMPLES=20 ";
    const int raw = std::system((env + JPOW_CLI + " lemma-suite --out " + (d / "c.jsonl").string() + " 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(raw) == 0);
    std::ifstream c(d / "c.jsonl");
    std::getline(c, la);
    CHECK(parse_json(la)["config"]["p"] == 3);
}
