#include <catch2/catch_amalgamated.hpp>

#include "jetforge/prolongation.hpp"

using namespace jetforge;

namespace {
const MultiIndex ix1(std::vector<std::uint32_t>{1});
const MultiIndex ix2(std::vector<std::uint32_t>{2});
const MultiIndex ix3(std::vector<std::uint32_t>{3});

JetSpec curve_spec() { return JetSpec({"x"}, {"u"}); }
}  // namespace

TEST_CASE("classical second prolongations on plane curves", "[prolongation]") {
    JetSpec spec = curve_spec();
    auto v = spec.vocab(0);
    auto v3 = spec.vocab(3);

    // rotation generator: coefficients 1 + u1^2 and 3 u1 u2
    VectorField rot(spec, {parse("-u", v)}, {parse("x", v)});
    ProlongedField pr_rot(rot, 3);
    REQUIRE(pr_rot.coeff(0, ix1) == parse("1 + u1^2", v3));
    REQUIRE(pr_rot.coeff(0, ix2) == parse("3*u1*u2", v3));

    // scaling generator: coefficients 0 and -u2
    VectorField scl(spec, {parse("x", v)}, {parse("u", v)});
    ProlongedField pr_scl(scl, 2);
    REQUIRE(pr_scl.coeff(0, ix1).is_zero());
    REQUIRE(pr_scl.coeff(0, ix2) == parse("-u2", v3));

    // the quadratic projective generator
    VectorField sq(spec, {parse("x^2", v)}, {parse("0", v)});
    ProlongedField pr_sq(sq, 2);
    REQUIRE(pr_sq.coeff(0, ix1) == parse("-2*x*u1", v3));
    REQUIRE(pr_sq.coeff(0, ix2) == parse("-2*u1 - 4*x*u2", v3));
}

TEST_CASE("prolongation respects brackets", "[prolongation]") {
    JetSpec spec = curve_spec();
    auto v = spec.vocab(0);
    VectorField rot(spec, {parse("-u", v)}, {parse("x", v)});
    VectorField scl(spec, {parse("x", v)}, {parse("u", v)});
    ProlongedField pr_rot(rot, 3);
    ProlongedField pr_scl(scl, 3);

    // pr([X,Y]) coefficients equal the commutator of the prolonged actions
    VectorField br = bracket(rot, scl);
    ProlongedField pr_br(br, 2);
    for (std::uint32_t h = 0; h <= 2; ++h) {
        for (const auto& j : multi_indices_of_order(1, h)) {
            Expr lhs = pr_br.coeff(0, j);
            Expr rhs = pr_rot.apply(pr_scl.coeff(0, j)) - pr_scl.apply(pr_rot.coeff(0, j));
            REQUIRE(lhs == rhs);
        }
    }
    Expr lhs = br.xi[0];
    Expr rhs = pr_rot.apply(scl.xi[0]) - pr_scl.apply(rot.xi[0]);
    REQUIRE(lhs == rhs);
}

TEST_CASE("prolongation is not function linear", "[prolongation]") {
    JetSpec spec = curve_spec();
    auto v = spec.vocab(0);
    VectorField rot(spec, {parse("-u", v)}, {parse("x", v)});
    ProlongedField pr_rot(rot, 1);

    VectorField xrot = rot * parse("x", v);
    ProlongedField pr_xrot(xrot, 1);
    Expr scaled = pr_rot.coeff(0, ix1) * parse("x", v);
    REQUIRE_FALSE(pr_xrot.coeff(0, ix1) == scaled);
}

TEST_CASE("graph transport under a shear", "[prolongation]") {
    // (x, u) -> (x + u, u) moves the graph of u = x^2 at x0 = 1 to base 2
    // with slope u1/(1+u1) = 2/3 and curvature u2/(1+u1)^3 = 2/27.
    JetSpec spec = curve_spec();
    auto v = spec.vocab(0);
    PolyJet sec = jet_of_section({parse("x^2", v)}, {Rational(1)}, 2, spec);

    PolyJetT<Rational> shear;
    shear.source = {Rational(1), Rational(1)};
    shear.target = {Rational(2), Rational(1)};
    shear.ord = 2;
    TruncSeries<Rational> c0(2, 2), c1(2, 2);
    c0.set(MultiIndex(std::vector<std::uint32_t>{1, 0}), Rational(1));
    c0.set(MultiIndex(std::vector<std::uint32_t>{0, 1}), Rational(1));
    c1.set(MultiIndex(std::vector<std::uint32_t>{0, 1}), Rational(1));
    shear.dev = {c0, c1};

    PolyJet moved = graph_transport(shear, sec);
    REQUIRE(moved.source[0] == 2);
    REQUIRE(moved.target[0] == 1);
    REQUIRE(moved.derivative(0, ix1) == Rational(2, 3));
    REQUIRE(moved.derivative(0, ix2) == Rational(2, 27));
}

TEST_CASE("numeric flow agrees with the symbolic prolongation", "[prolongation]") {
    JetSpec spec = curve_spec();
    auto v = spec.vocab(0);
    VectorField rot(spec, {parse("-u", v)}, {parse("x", v)});

    FlowCheckReport rep = flow_check(rot, {parse("x^2", v)}, {Rational(1, 2)}, 3);
    CAPTURE(rep.max_error);
    REQUIRE(rep.passed);
    REQUIRE(rep.order == 3);
    REQUIRE(rep.rows.size() >= 4);
}

TEST_CASE("prolonged field applies as a derivation", "[prolongation]") {
    JetSpec spec = curve_spec();
    auto v2 = spec.vocab(2);
    VectorField rot(spec, {parse("-u", spec.vocab(0))}, {parse("x", spec.vocab(0))});
    ProlongedField pr(rot, 2);

    // the curvature square is annihilated by the rotation prolongation
    Expr k2 = parse("u2^2/(1+u1^2)^3", v2);
    REQUIRE(pr.apply(k2).is_zero());

    // but the slope is not
    REQUIRE_FALSE(pr.apply(parse("u1", v2)).is_zero());
}
