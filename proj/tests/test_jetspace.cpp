#include <catch2/catch_amalgamated.hpp>

#include "jetforge/jetspace.hpp"
#include "jetforge/polyjet.hpp"

using namespace jetforge;

namespace {
const MultiIndex e0(1);
const MultiIndex e1(std::vector<std::uint32_t>{1});
const MultiIndex e2(std::vector<std::uint32_t>{2});
const MultiIndex e3(std::vector<std::uint32_t>{3});
}  // namespace

TEST_CASE("multi index order and enumeration", "[jetspace]") {
    REQUIRE(e2.order() == 2);

    // enumeration varies the last base variable first
    auto o1 = multi_indices_of_order(2, 1);
    REQUIRE(o1.size() == 2);
    REQUIRE(o1[0] == MultiIndex(std::vector<std::uint32_t>{0, 1}));
    REQUIRE(o1[1] == MultiIndex(std::vector<std::uint32_t>{1, 0}));
    auto o2 = multi_indices_of_order(2, 2);
    REQUIRE(o2.size() == 3);
    REQUIRE(o2[0] == MultiIndex(std::vector<std::uint32_t>{0, 2}));
    REQUIRE(o2[1] == MultiIndex(std::vector<std::uint32_t>{1, 1}));
    REQUIRE(o2[2] == MultiIndex(std::vector<std::uint32_t>{2, 0}));
    REQUIRE(multi_indices_of_order(3, 2).size() == 6);
}

TEST_CASE("jet coordinates and classification", "[jetspace]") {
    JetSpec spec({"x", "y"}, {"u"});
    auto coords = spec.fiber_coordinates(2);
    REQUIRE(coords.size() == 6);

    auto cls = spec.classify(spec.jet(0, MultiIndex(std::vector<std::uint32_t>{1, 1})));
    REQUIRE(cls);
    REQUIRE(cls->first == 0);
    REQUIRE(cls->second == MultiIndex(std::vector<std::uint32_t>{1, 1}));
    REQUIRE_FALSE(spec.classify(spec.x(0)));

    JetSpec other({"t"}, {"w"});
    REQUIRE_FALSE(spec.classify(other.u(0)));
}

TEST_CASE("truncated series reciprocal", "[jetspace]") {
    // 1/(1+t) = 1 - t + t^2 - t^3
    TruncSeries<Rational> one_plus_t(1, 3);
    one_plus_t.set(e0, Rational(1));
    one_plus_t.set(e1, Rational(1));
    auto rec = series_reciprocal(one_plus_t);
    REQUIRE(rec.coeff(e0) == 1);
    REQUIRE(rec.coeff(e1) == -1);
    REQUIRE(rec.coeff(e2) == 1);
    REQUIRE(rec.coeff(e3) == -1);
}

TEST_CASE("rational matrix inverse", "[jetspace]") {
    std::vector<std::vector<Rational>> m = {{Rational(2), Rational(1)},
                                            {Rational(1), Rational(1)}};
    auto mi = matrix_inverse(m);
    REQUIRE(mi[0][0] == 1);
    REQUIRE(mi[0][1] == -1);
    REQUIRE(mi[1][0] == -1);
    REQUIRE(mi[1][1] == 2);
}

TEST_CASE("jet of a rational section", "[jetspace]") {
    JetSpec spec({"x"}, {"u"});
    auto vx = spec.vocab(0);

    // 3-jet of 1/(1+x) at 0: derivatives 1, -1, 2, -6
    PolyJet js = jet_of_section({parse("1/(1+x)", vx)}, {Rational(0)}, 3, spec);
    REQUIRE(js.target[0] == 1);
    REQUIRE(js.derivative(0, e1) == -1);
    REQUIRE(js.derivative(0, e2) == 2);
    REQUIRE(js.derivative(0, e3) == -6);

    // truncation drops higher terms but keeps the rest
    PolyJet j1 = js.truncated(1);
    REQUIRE(j1.ord == 1);
    REQUIRE(j1.derivative(0, e1) == -1);

    // a pole at the base point is a domain error
    REQUIRE_THROWS_AS(jet_of_section({parse("1/(1+x)", vx)}, {Rational(-1)}, 2, spec),
                      DivisionByZero);
}

TEST_CASE("jet composition", "[jetspace]") {
    JetSpec spec({"x"}, {"u"});
    auto vx = spec.vocab(0);
    // f(x) = x + x^2, g(y) = y + y^3, so g(f(x)) = x + x^2 + x^3 + O(4)
    PolyJet jf = jet_of_section({parse("x + x^2", vx)}, {Rational(0)}, 3, spec);
    PolyJet jg = jet_of_section({parse("x + x^3", vx)}, {Rational(0)}, 3, spec);
    PolyJet h = polyjet_compose(jg, jf);
    REQUIRE(h.taylor(0, e1) == 1);
    REQUIRE(h.taylor(0, e2) == 1);
    REQUIRE(h.taylor(0, e3) == 1);

    // composing with the identity changes nothing
    PolyJet idj = PolyJet::identity({Rational(0)}, 3);
    REQUIRE(jets_identical(polyjet_compose(jf, idj), jf));

    // source/target mismatch is rejected
    PolyJet far = jet_of_section({parse("x", vx)}, {Rational(5)}, 3, spec);
    REQUIRE_THROWS_AS(polyjet_compose(jg, far), BasePointMismatch);
}

TEST_CASE("jet inversion", "[jetspace]") {
    JetSpec spec({"x"}, {"u"});
    auto vx = spec.vocab(0);
    // f(x) = x + x^2 inverts to y - y^2 + O(3)
    PolyJet j2 = jet_of_section({parse("x + x^2", vx)}, {Rational(0)}, 2, spec);
    PolyJet inv = polyjet_invert(j2);
    REQUIRE(inv.taylor(0, e1) == 1);
    REQUIRE(inv.taylor(0, e2) == -1);

    PolyJet rt = polyjet_compose(inv, j2);
    REQUIRE(rt.taylor(0, e1) == 1);
    REQUIRE(rt.taylor(0, e2) == 0);

    // a singular linear part cannot be inverted
    PolyJet flat = jet_of_section({parse("x^2", vx)}, {Rational(0)}, 2, spec);
    REQUIRE_THROWS_AS(polyjet_invert(flat), SingularLinearPart);
}

TEST_CASE("total derivative", "[jetspace]") {
    JetSpec spec({"x"}, {"u"});
    auto v2 = spec.vocab(2);
    Expr u1 = Expr::sym(spec.jet(0, e1));
    Expr u2 = Expr::sym(spec.jet(0, e2));

    REQUIRE(total_derivative(parse("u1^2", v2), 0, spec) == parse("2*u1*u2", spec.vocab(2)));
    REQUIRE(total_derivative(parse("x*u", v2), 0, spec) == parse("u + x*u1", spec.vocab(1)));

    // iterated form via a multi-index
    Expr d2 = total_derivative(Expr::sym(spec.u(0)), e2, spec);
    REQUIRE(d2 == u2);

    // chain rule through a quotient
    Expr q = total_derivative(parse("u/(1+x)", v2), 0, spec);
    REQUIRE(q == parse("u1/(1+x) - u/(1+x)^2", spec.vocab(1)));

    // symbols from a different bundle are rejected
    JetSpec other({"t"}, {"w"});
    Expr w1 = Expr::sym(other.jet(0, e1));
    REQUIRE_THROWS_AS(total_derivative(w1, 0, spec), InputError);
}

TEST_CASE("jets with parameters", "[jetspace]") {
    // section components may mention extra symbols bound at jet time
    JetSpec spec({"x"}, {"u"});
    SymbolId a = intern_base("a", 7);
    Vocabulary v = spec.vocab(0);
    v.add(a);
    Point params;
    params[a] = Rational(3);
    PolyJet j = jet_of_section({parse("a*x^2", v)}, {Rational(1)}, 2, spec, params);
    REQUIRE(j.target[0] == 3);
    REQUIRE(j.derivative(0, e1) == 6);
    REQUIRE(j.derivative(0, e2) == 6);
}
