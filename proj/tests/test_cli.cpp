#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "jetforge/problem.hpp"
#include "jetforge/report.hpp"

using namespace jetforge;

namespace {

std::string fixture(const std::string& name) {
    return std::string(JETFORGE_SOURCE_DIR) + "/tests/fixtures/" + name;
}

Json minimal_sections() {
    Json j;
    j["name"] = "curves";
    j["mode"] = "sections";
    j["independents"] = Json::array({"x"});
    j["dependents"] = Json::array({"u"});
    j["pseudo_algebra"] = Json::object();
    j["pseudo_algebra"]["type"] = "finite_basis";
    j["pseudo_algebra"]["generators"] = Json::array(
        {Json::array({"1", "0"}), Json::array({"0", "1"}), Json::array({"-u", "x"})});
    j["max_order"] = 4;
    return j;
}

Json minimal_structure() {
    Json s;
    s["name"] = "flat_metric";
    s["mode"] = "structure";
    s["independents"] = Json::array({"x", "y"});
    s["structure"] = Json::object();
    s["structure"]["tensor_type"] = Json::object();
    s["structure"]["tensor_type"]["contravariant"] = 0;
    s["structure"]["tensor_type"]["covariant"] = 2;
    s["structure"]["tensor_type"]["symmetry"] = "symmetric";
    s["structure"]["components"] = Json::array({"1", "0", "1"});
    s["pseudo_algebra"] = Json::object();
    s["pseudo_algebra"]["type"] = "lie_equation";
    s["pseudo_algebra"]["order"] = 1;
    return s;
}

}  // namespace

TEST_CASE("section problems load and echo losslessly", "[problem]") {
    ProblemSpec p = load_problem_json(minimal_sections());
    REQUIRE(p.mode == "sections");
    REQUIRE(p.generators.size() == 3);
    REQUIRE(p.max_order == 4);

    ProblemSpec p2 = load_problem_json(problem_echo(p));
    REQUIRE(p2.generators.size() == 3);
    REQUIRE(p2.independents == p.independents);
    REQUIRE(p2.dependents == p.dependents);

    auto gens = p.section_generators();
    REQUIRE(gens.size() == 3);
    auto frame = p.distribution(2);
    REQUIRE(frame.ambient_dim() == 4);
}

TEST_CASE("structure problems load and echo losslessly", "[problem]") {
    ProblemSpec q = load_problem_json(minimal_structure());
    REQUIRE(q.mode == "structure");
    REQUIRE(q.structure);
    REQUIRE(q.structure->comps.size() == 3);
    REQUIRE(q.lie_order == 1);

    ProblemSpec q2 = load_problem_json(problem_echo(q));
    REQUIRE(q2.structure.has_value());
    REQUIRE(q2.structure->type.covariant == 2);

    auto f = q.distribution(1);
    REQUIRE(f.ambient_dim() > 0);
}

TEST_CASE("schema errors carry json pointer paths", "[problem]") {
    SECTION("bad mode") {
        Json bad = minimal_sections();
        bad["mode"] = "nonsense";
        try {
            load_problem_json(bad);
            FAIL("expected a schema error");
        } catch (const SchemaError& e) {
            REQUIRE(std::string(e.what()).find("/mode") != std::string::npos);
        }
    }
    SECTION("generator arity") {
        Json bad = minimal_sections();
        bad["pseudo_algebra"]["generators"][0] = Json::array({"1"});
        try {
            load_problem_json(bad);
            FAIL("expected a schema error");
        } catch (const SchemaError& e) {
            REQUIRE(std::string(e.what()).find("/pseudo_algebra/generators/0") !=
                    std::string::npos);
        }
    }
    SECTION("missing algebra") {
        Json bad = minimal_sections();
        bad.erase("pseudo_algebra");
        REQUIRE_THROWS_AS(load_problem_json(bad), SchemaError);
    }
    SECTION("dependents forbidden in structure mode") {
        Json bad = minimal_structure();
        bad["dependents"] = Json::array({"u"});
        REQUIRE_THROWS_AS(load_problem_json(bad), SchemaError);
    }
    SECTION("unparsable generator component") {
        Json bad = minimal_sections();
        bad["pseudo_algebra"]["generators"][0] = Json::array({"1 +", "0"});
        REQUIRE_THROWS_AS(load_problem_json(bad), InputError);
    }
}

TEST_CASE("every bundled fixture loads", "[problem]") {
    const char* names[] = {
        "se2_curves.json",   "translations1d.json", "sl2_line.json",
        "euclidean2.json",   "euclidean3.json",     "volume2.json",
        "minkowski2.json",   "sphere_metric.json",  "euclid_motions2.json",
    };
    for (const char* n : names) {
        INFO(n);
        ProblemSpec p = load_problem(fixture(n));
        REQUIRE_FALSE(p.name.empty());
        REQUIRE((p.mode == "sections" || p.mode == "structure"));
        // echo then reload: the round trip must accept its own output
        ProblemSpec back = load_problem_json(problem_echo(p));
        REQUIRE(back.mode == p.mode);
        REQUIRE(back.seed == p.seed);
    }
}

TEST_CASE("fixture semantics match their names", "[problem]") {
    ProblemSpec se2 = load_problem(fixture("se2_curves.json"));
    REQUIRE(se2.generators.size() == 3);
    auto rr = rank_table([&](std::uint32_t k) { return se2.distribution(k); }, 4,
                         6, se2.seed);
    std::size_t expect_codim[5] = {0, 0, 1, 2, 3};
    for (std::uint32_t k = 0; k <= 4; ++k) REQUIRE(rr.rows[k].codim == expect_codim[k]);

    ProblemSpec g2 = load_problem(fixture("euclidean2.json"));
    LinearJetSystem sys = lie_equation(*g2.structure, 2);
    Point pt = bind_base(sys.vfspec, {Rational(1), Rational(1, 2)});
    REQUIRE(sys.solution_dim(pt) == 3);

    ProblemSpec g3 = load_problem(fixture("euclidean3.json"));
    LinearJetSystem sys3 = lie_equation(*g3.structure, 2);
    Point p3 = bind_base(sys3.vfspec, {Rational(1), Rational(0), Rational(-1)});
    REQUIRE(sys3.solution_dim(p3) == 6);
}

TEST_CASE("report envelopes and renderers", "[report]") {
    ProblemSpec p = load_problem_json(minimal_sections());
    Json env = report_envelope("orbits", &p);
    REQUIRE(env["version"] == kVersion);
    REQUIRE(env["prng"] == kPrngName);
    REQUIRE(env["command"] == "orbits");

    auto rr = rank_table([&](std::uint32_t k) { return p.distribution(k); }, 2, 4, 17);
    env["result"] = rank_report_json(rr);

    std::string js = render_report(env, "json");
    REQUIRE_FALSE(js.empty());
    Json round = Json::parse(js);
    REQUIRE(round["result"]["rows"].size() == 3);

    // the text renderer flattens to dotted paths, one per line
    std::string txt = render_report(env, "text");
    REQUIRE(txt.find("command: \"orbits\"") != std::string::npos);
    REQUIRE(txt.find("result.rows[0]") != std::string::npos);
}

TEST_CASE("reports serialize deterministically", "[report]") {
    ProblemSpec p = load_problem_json(minimal_sections());
    auto make = [&](std::uint32_t k) { return p.distribution(k); };

    Json a = report_envelope("orbits", &p);
    a["result"] = rank_report_json(rank_table(make, 3, 5, 11));
    Json b = report_envelope("orbits", &p);
    b["result"] = rank_report_json(rank_table(make, 3, 5, 11));
    REQUIRE(render_report(a, "json") == render_report(b, "json"));

    // filtration rows cover orders 1 through kmax
    Json f = filtration_report_json(kernel_filtration(make, 3, 4, 11));
    REQUIRE(f.contains("rows"));
    REQUIRE(f["rows"].size() == 3);
}
