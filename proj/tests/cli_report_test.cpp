#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mm/suite.hpp>

using namespace mm;

TEST_CASE("field specifications") {
    CHECK(parse_field("1")->deg() == 1);
    CHECK(parse_field("-2,0,1")->deg() == 2);
    CHECK(parse_field("-2,0,0,1")->deg() == 3);
    CHECK_THROWS_AS(parse_field(""), ParseError);
    CHECK_THROWS_AS(parse_field("-2,0,"), ParseError);
    CHECK_THROWS_AS(parse_field("1,x"), ParseError);
}

TEST_CASE("divisor grammar") {
    NFPtr k = parse_field("-2,0,1");
    Divisor d = parse_divisor("3*(t) + 1*(t^2-2) + 2*inf@1", k);
    CHECK(d.degree() == 7);
    CHECK(format_divisor(d) == "3*(t) + 1*(t^2 - 2) + 2*inf@1");
    CHECK(parse_divisor("0", k).empty());
    CHECK(parse_divisor("", k).empty());
    CHECK(parse_divisor("(t - g)", k).degree() == 1);

    // errors point at the start of the offending term
    auto at = [](const std::string& text, const NFPtr& kk) -> std::string {
        try {
            parse_divisor(text, kk);
        } catch (const ParseError& e) {
            return e.what();
        }
        return "";
    };
    CHECK(at("(t^2)", k).find("position 0") != std::string::npos);
    CHECK(at("(t^2)", k).find("squarefree") != std::string::npos);
    CHECK(at("1*(t) + (2*t)", k).find("position 8") != std::string::npos);
    CHECK(at("1*(t) + (2*t)", k).find("monic") != std::string::npos);
    CHECK(at("(3)", k).find("nonconstant") != std::string::npos);
    CHECK(at("2(t)", k) != "");
}

TEST_CASE("map grammar and multipliers") {
    NFPtr k = parse_field("-2,0,1");
    RationalMap f = parse_map("(t^2 - 1)/(2*t)", k);
    // rational functions normalize to a monic denominator
    CHECK(format_map(f) == "(1/2*t^2 - 1/2)/(t)");
    CHECK(f == parse_map("(1/2*t^2 - 1/2)/(t)", k));
    CHECK_THROWS_AS(parse_map("(t)/(0)", k), ParseError);
    CHECK_THROWS_AS(parse_map("(t)/(1) junk", k), ParseError);

    std::vector<FE> m = parse_multipliers("2,g,g+1", k);
    REQUIRE(m.size() == 3);
    CHECK(m[1] == FE::gen(k));
    CHECK(m[2] == FE::gen(k) + FE(Rat(1)).promote(k));
    CHECK(parse_multipliers("", k).empty());
    CHECK_THROWS_AS(parse_multipliers("t", k), ParseError);
}

TEST_CASE("corpus is deterministic and honors its caps") {
    SuiteConfig cfg;
    cfg.maxdeg = 4;
    cfg.budget = 10;
    cfg.seed = 7;
    Corpus a = corpus_generate(cfg);
    Corpus b = corpus_generate(cfg);
    REQUIRE(a.triples.size() == b.triples.size());
    for (size_t i = 0; i < a.triples.size(); ++i) CHECK(a.triples[i] == b.triples[i]);
    REQUIRE(a.edges.size() == b.edges.size());
    for (size_t i = 0; i < a.edges.size(); ++i) {
        CHECK(a.edges[i].f == b.edges[i].f);
        CHECK(a.edges[i].src == b.edges[i].src);
        CHECK(a.edges[i].dst == b.edges[i].dst);
    }
    CHECK(a.composable == b.composable);

    SuiteConfig other = cfg;
    other.seed = 8;
    Corpus c = corpus_generate(other);
    bool same = a.triples.size() == c.triples.size();
    if (same)
        for (size_t i = 0; i < a.triples.size(); ++i)
            if (!(a.triples[i] == c.triples[i])) same = false;
    CHECK_FALSE(same);

    for (const auto& t : a.triples) {
        CHECK(t.Y.degree() + t.Z.degree() <= cfg.maxdeg);
        CHECK(t.components == 1);
    }
    for (const auto& t : a.unions) CHECK(t.components == 2);
    for (const auto& e : a.edges)
        CHECK(is_morphism_bar(e.f, a.triples[e.src], a.triples[e.dst]));
    for (const auto& [x, y] : a.composable) CHECK(a.edges[x].dst == a.edges[y].src);
}

TEST_CASE("small degree caps keep the basic instances") {
    SuiteConfig cfg;
    cfg.maxdeg = 2;
    cfg.budget = 0;
    Corpus c = corpus_generate(cfg);
    Divisor p0 = Divisor::single(Place::finite({FE(0), FE(1)}));
    Divisor pinf = Divisor::single(Place::infinity());
    ModulusTriple basic(p0, pinf);
    ModulusTriple thick(2 * p0, Divisor());
    bool has_basic = false, has_thick = false;
    for (const auto& t : c.triples) {
        if (t == basic) has_basic = true;
        if (t == thick) has_thick = true;
    }
    CHECK(has_basic);
    CHECK(has_thick);

    cfg.maxdeg = 0;
    CHECK(corpus_generate(cfg).triples.empty());
}

TEST_CASE("suite runs") {
    SuiteConfig cfg;
    cfg.maxdeg = 3;
    cfg.budget = 4;
    cfg.out_path = "/dev/null";

    SUBCASE("dims pass on a small corpus") {
        Report r = run_suite("dims", cfg);
        CHECK(r.checks.size() > 0);
        CHECK(r.all_pass());
    }
    SUBCASE("empty corpus passes vacuously with a warning") {
        cfg.maxdeg = 0;
        Report r = run_suite("dims", cfg);
        CHECK(r.checks.empty());
        CHECK(r.all_pass());
        REQUIRE(r.warnings.size() == 1);
        CHECK(r.warnings[0].find("vacuous") != std::string::npos);
    }
    SUBCASE("an injected fault is caught with a witness") {
        cfg.inject_fault = true;
        Report r = run_suite("decomposition", cfg);
        CHECK_FALSE(r.all_pass());
        bool witnessed = false;
        for (const auto& c : r.checks)
            if (!c.pass && !c.witness.empty()) witnessed = true;
        CHECK(witnessed);
    }
    SUBCASE("unknown suites and unwritable outputs are rejected") {
        CHECK_THROWS_AS(run_suite("nosuch", cfg), BadIndex);
        cfg.maxdeg = 0;
        cfg.out_path = "/nonexistent/dir/report.json";
        CHECK_THROWS_AS(run_suite("dims", cfg), IOError);
    }
}

TEST_CASE("report serialization") {
    Report r;
    r.suite = "dims";
    r.field = "1";
    CheckRecord ok{"alpha \"quoted\"", true, "", "| a | b |", 3};
    CheckRecord bad{"beta", false, "{\"got\":1}", "", 5};
    r.checks = {ok, bad};
    std::string j = report_json(r);
    CHECK(j.find("\"schema\":\"modcoh/1\"") != std::string::npos);
    CHECK(j.find("\"corpus\":\"pool/1\"") != std::string::npos);
    CHECK(j.find("alpha \\\"quoted\\\"") != std::string::npos);
    CHECK(j.find("\"status\":\"fail\"") != std::string::npos);
    CHECK(j.find("\"passed\":1") != std::string::npos);
    CHECK(report_json(r) == j); // byte-identical reruns
    std::string m = report_markdown(r);
    CHECK(m.find("| Y | Z |") != std::string::npos);
    CHECK(m.find("| a | b |") != std::string::npos);
    CHECK(m.find("1 of 2 checks failed") != std::string::npos);
}

TEST_CASE("quiver representations from JSON") {
    QuiverRep rep = quiver_rep_from_json(
        "{\"vertices\": {\"v\": 2},\n"
        " \"edges\": [{\"src\": \"v\", \"dst\": \"v\", \"label\": \"n\",\n"
        "   \"matrix\": [[0, \"1/2\"], [0, 0]]}]}");
    CHECK(rep.dims.at("v") == 2);
    REQUIRE(rep.q.edges.size() == 1);
    CHECK(rep.maps.at("n")(0, 1) == Rat(1, 2));
    CHECK(end_compute(rep).dim() == 2);
    CHECK_THROWS_AS(quiver_rep_from_json("{\"vertices\": {}}"), ParseError);
    CHECK_THROWS_AS(quiver_rep_from_json("[1, 2"), ParseError);
}
