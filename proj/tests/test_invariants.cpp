#include <catch2/catch_amalgamated.hpp>

#include "jetforge/invariants.hpp"
#include "jetforge/parser.hpp"

using namespace jetforge;

namespace {

Expr E(const std::string& s) {
    static JetSpec spec({"x"}, {"u"});
    static Vocabulary v = spec.vocab(4);
    return parse(s, v);
}

std::vector<VectorField> rigid_motions_on_curves() {
    JetSpec spec({"x"}, {"u"});
    return {VectorField(spec, {E("1")}, {E("0")}),
            VectorField(spec, {E("0")}, {E("1")}),
            VectorField(spec, {E("-u")}, {E("x")})};
}

std::vector<VectorField> translations() {
    JetSpec spec({"x"}, {"u"});
    return {VectorField(spec, {E("1")}, {E("0")}),
            VectorField(spec, {E("0")}, {E("1")})};
}

}  // namespace

TEST_CASE("exact invariant verification", "[invariants]") {
    JetSpec spec({"x"}, {"u"});
    Expr kappa2 = E("u2^2/(1+u1^2)^3");

    std::vector<VectorField> du = {VectorField(spec, {E("0")}, {E("1")})};
    REQUIRE(verify_invariant({0, E("x")}, du));
    REQUIRE(verify_invariant({2, kappa2}, rigid_motions_on_curves()));
    REQUIRE_FALSE(verify_invariant({1, E("u1")}, rigid_motions_on_curves()));
}

TEST_CASE("pointwise invariant verification on frames", "[invariants]") {
    Expr kappa2 = E("u2^2/(1+u1^2)^3");
    auto frame2 = build_distribution(rigid_motions_on_curves(), 2);
    auto frame3 = build_distribution(rigid_motions_on_curves(), 3);
    REQUIRE(verify_invariant({2, kappa2}, frame2, 4, 31));
    REQUIRE(verify_invariant({2, kappa2}, frame3, 4, 31));  // lifts to higher frames
    REQUIRE_FALSE(verify_invariant({1, E("u1")}, frame2, 4, 31));
}

TEST_CASE("invariant search on low order slices", "[invariants]") {
    SECTION("translations leave exactly the slope at order 1") {
        auto basis = search_invariants(translations(), 1, 1, E("1"), 41);
        REQUIRE(basis.size() == 1);
        REQUIRE((basis[0].expr - E("u1")).is_zero());
    }
    SECTION("rigid motions act transitively on the order 1 slice") {
        auto basis = search_invariants(rigid_motions_on_curves(), 1, 2, E("1+u1^2"), 41);
        REQUIRE(basis.empty());
    }
    SECTION("order 2 search recovers the squared curvature") {
        Expr kappa2 = E("u2^2/(1+u1^2)^3");
        auto basis =
            search_invariants(rigid_motions_on_curves(), 2, 6, E("(1+u1^2)^3"), 41);
        REQUIRE(basis.size() == 1);
        REQUIRE((basis[0].expr - kappa2).is_zero());
        REQUIRE(verify_invariant(basis[0], rigid_motions_on_curves()));
    }
}

TEST_CASE("derivation admissibility", "[invariants]") {
    FormalDerivation unit{{E("1")}, 0};
    REQUIRE(admissibility_test(unit, translations()));
    REQUIRE_FALSE(admissibility_test(unit, rigid_motions_on_curves()));

    FormalDerivation arclen{{E("(1+u1^2)^(-1/2)")}, 1};
    REQUIRE(admissibility_test(arclen, rigid_motions_on_curves()));
}

TEST_CASE("formal derivation of invariants", "[invariants]") {
    JetSpec spec({"x"}, {"u"});
    Expr kappa2 = E("u2^2/(1+u1^2)^3");

    FormalDerivation unit{{E("1")}, 0};
    auto one = formal_derive(unit, {0, E("x")}, spec);
    REQUIRE((one.expr - E("1")).is_zero());
    REQUIRE(one.order == 1);
    auto zero = formal_derive(unit, {0, E("5")}, spec);
    REQUIRE(zero.expr.is_zero());

    // deriving along arclength keeps invariance and raises the order by one
    FormalDerivation arclen{{E("(1+u1^2)^(-1/2)")}, 1};
    auto dk = formal_derive(arclen, {2, kappa2}, spec);
    REQUIRE(dk.order == 3);
    REQUIRE(verify_invariant(dk, rigid_motions_on_curves()));
}

TEST_CASE("derivation brackets close on scalars", "[invariants]") {
    JetSpec spec({"x"}, {"u"});
    FormalDerivation arclen{{E("(1+u1^2)^(-1/2)")}, 1};
    FormalDerivation weighted{{E("u1")}, 1};
    REQUIRE(derivation_bracket_check(arclen, weighted, E("u2^2+x*u1"), spec));
}

TEST_CASE("generated invariants exhaust the orbit codimension", "[invariants]") {
    Expr kappa2 = E("u2^2/(1+u1^2)^3");
    FormalDerivation arclen{{E("(1+u1^2)^(-1/2)")}, 1};

    auto frame3 = build_distribution(rigid_motions_on_curves(), 3);
    auto rep = finiteness_span_check({{2, kappa2}}, {arclen}, frame3, 4, 43);
    REQUIRE(rep.pass);
    REQUIRE(rep.per_sample[0].function_rank == 2);
    REQUIRE(rep.per_sample[0].codim == 2);

    FormalDerivation ddx{{E("1")}, 0};
    auto tframe = build_distribution(translations(), 2);
    auto trep = finiteness_span_check({{1, E("u1")}}, {ddx}, tframe, 4, 43);
    REQUIRE(trep.pass);

    // no seed functions cannot cover a positive codimension
    auto empty = finiteness_span_check({}, {arclen}, frame3, 3, 43);
    REQUIRE_FALSE(empty.pass);
    REQUIRE(empty.per_sample[0].function_rank == 0);
}
