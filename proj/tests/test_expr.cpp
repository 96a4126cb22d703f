#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "jetforge/jetspace.hpp"
#include "jetforge/parser.hpp"

using namespace jetforge;

namespace {

Vocabulary curve_vocab(std::uint32_t k) {
    static JetSpec spec({"x"}, {"u"});
    return spec.vocab(k);
}

Expr E(const std::string& s) {
    static Vocabulary v = curve_vocab(4);
    return parse(s, v);
}

}  // namespace

TEST_CASE("rational constants and field axioms", "[expr]") {
    Expr zero;
    REQUIRE(zero.is_zero());
    REQUIRE(zero.is_constant());

    Expr half = Expr::from_rational(Rational(1, 2));
    Expr third = Expr::from_rational(Rational(1, 3));
    REQUIRE((half + third).as_rational() == Rational(5, 6));
    REQUIRE((half * third).as_rational() == Rational(1, 6));
    REQUIRE((half - half).is_zero());
    REQUIRE((half / third).as_rational() == Rational(3, 2));

    // canonical form: 2/4 and 1/2 are the same object
    REQUIRE(Expr::from_rational(Rational(2, 4)) == half);
}

TEST_CASE("polynomial arithmetic is canonical", "[expr]") {
    Expr x = E("x"), u = E("u");

    Expr a = (x + u) * (x - u);
    Expr b = x * x - u * u;
    REQUIRE(a == b);

    // binomial cube expands and recombines
    Expr c = (x + Expr::from_long(1)) * (x + Expr::from_long(1)) * (x + Expr::from_long(1));
    REQUIRE(c == E("x^3+3*x^2+3*x+1"));

    // cancellation happens automatically in the quotient normal form
    Expr q = (x * x - u * u) / (x - u);
    REQUIRE(q == x + u);
    Expr r = (x * x + x) / x;
    REQUIRE(r == x + Expr::from_long(1));
}

TEST_CASE("quotients share one normal form", "[expr]") {
    Expr a = E("1/(1+x)") + E("1/(1-x)");
    REQUIRE(a == E("2/(1-x^2)"));

    Expr b = E("(x^2-1)/(x^2+2*x+1)");
    REQUIRE(b == E("(x-1)/(x+1)"));

    // equality is structural on the canonical pair
    REQUIRE(E("u2^2/(1+u1^2)^3") == E("(u2*u2)/((1+u1^2)*(1+u1^2)*(1+u1^2))"));
}

TEST_CASE("parse and print round trip", "[expr]") {
    Vocabulary v = curve_vocab(4);
    const char* samples[] = {
        "x",
        "u1",
        "1+u1^2",
        "u2^2/(1+u1^2)^3",
        "-2*u1-4*x*u2",
        "(x+u)/(x-u)",
        "3/5*x-4/5*u",
        "x^2*u3-7/2",
    };
    for (const char* s : samples) {
        Expr e = parse(s, v);
        Expr back = parse(print_expr(e), v);
        INFO(s << " -> " << print_expr(e));
        REQUIRE(back == e);
    }
}

TEST_CASE("parser reports errors with positions", "[expr]") {
    Vocabulary v = curve_vocab(2);
    REQUIRE_THROWS_AS(parse("x +", v), SyntaxError);
    REQUIRE_THROWS_AS(parse("(x+1", v), SyntaxError);
    REQUIRE_THROWS_AS(parse("x ** 2", v), SyntaxError);
    REQUIRE_THROWS_AS(parse("zeta", v), UnknownSymbol);
    REQUIRE_THROWS_AS(parse("u5", v), UnknownSymbol);  // beyond vocab order
    REQUIRE_THROWS_AS(parse("1/0", v), DivisionByZero);
}

TEST_CASE("differentiation", "[expr]") {
    JetSpec spec({"x"}, {"u"});
    Vocabulary v = spec.vocab(2);
    SymbolId x = spec.x(0);
    SymbolId u1 = spec.jet(0, MultiIndex(std::vector<std::uint32_t>{1}));

    REQUIRE(diff(parse("x^3", v), x) == parse("3*x^2", v));
    REQUIRE(diff(parse("1/(1+x)", v), x) == parse("-1/(1+x)^2", v));
    REQUIRE(diff(parse("u1^2*x", v), u1) == parse("2*u1*x", v));
    REQUIRE(diff(parse("u", v), x).is_zero());

    // quotient rule on the curvature square
    Expr k2 = parse("u2^2/(1+u1^2)^3", v);
    Expr dk = diff(k2, u1);
    REQUIRE(dk == parse("-6*u1*u2^2/(1+u1^2)^4", v));
}

TEST_CASE("fractional powers carry guard atoms", "[expr]") {
    Expr g = expr_pow(E("1+u1^2"), Rational(1, 2));
    REQUIRE(g.has_guard());

    // guard atoms multiply and cancel like ordinary powers
    REQUIRE(g * g == E("1+u1^2"));
    Expr inv = Expr::from_long(1) / g;
    REQUIRE(inv * g == Expr::from_long(1));
    REQUIRE(expr_pow(E("1+u1^2"), Rational(-1, 2)) == inv);

    // integer exponents never introduce guards
    REQUIRE_FALSE(expr_pow(E("1+x^2"), Rational(3)).has_guard());
    REQUIRE(expr_pow(E("x+1"), Rational(2)) == E("x^2+2*x+1"));
    REQUIRE(expr_pow(E("x+1"), Rational(-1)) == E("1/(x+1)"));

    // rational bases reduce numerically when the root is exact
    REQUIRE(expr_pow(Expr::from_long(4), Rational(1, 2)) == Expr::from_long(2));
    REQUIRE(expr_pow(Expr::from_rational(Rational(8, 27)), Rational(1, 3)) ==
            Expr::from_rational(Rational(2, 3)));

    // a sign-indefinite base is rejected rather than silently guarded
    REQUIRE_THROWS_AS(expr_pow(E("x"), Rational(1, 2)), NegativeBaseFractionalPower);
    REQUIRE_NOTHROW(expr_pow(E("x"), Rational(1, 2), true));
}

TEST_CASE("guard atoms parse from surface syntax", "[expr]") {
    Expr s = E("(1+u1^2)^(-1/2)");
    REQUIRE(s.has_guard());
    REQUIRE(s * s == E("1/(1+u1^2)"));
    Expr back = parse(print_expr(s), curve_vocab(4));
    REQUIRE(back == s);
}

TEST_CASE("substitution", "[expr]") {
    JetSpec spec({"x"}, {"u"});
    Vocabulary v = spec.vocab(1);
    Bindings bind;
    bind[spec.u(0)] = parse("x^2", v);
    Expr e = subs(parse("u^2+x*u", v), bind);
    REQUIRE(e == parse("x^4+x^3", v));

    // substituting into a quotient keeps exactness
    Expr q = subs(parse("1/(1+u)", v), bind);
    REQUIRE(q == parse("1/(1+x^2)", v));
}

TEST_CASE("exact and numeric evaluation", "[expr]") {
    JetSpec spec({"x"}, {"u"});
    Vocabulary v = spec.vocab(2);
    Point p;
    p[spec.x(0)] = Rational(1, 2);
    p[spec.u(0)] = Rational(3);
    p[spec.jet(0, MultiIndex(std::vector<std::uint32_t>{1}))] = Rational(2);
    p[spec.jet(0, MultiIndex(std::vector<std::uint32_t>{2}))] = Rational(-1);

    REQUIRE(eval_rational(parse("x+u", v), p) == Rational(7, 2));
    REQUIRE(eval_rational(parse("u2^2/(1+u1^2)^3", v), p) == Rational(1, 125));

    // pole and irrational guard both refuse to produce a rational
    REQUIRE_THROWS_AS(eval_rational(parse("1/(2*x-1)", v), p), DivisionByZero);
    Expr root = expr_pow(parse("1+u1^2", v), Rational(1, 2));
    REQUIRE_THROWS_AS(eval_rational(root, p), IrrationalValue);

    DoublePoint dp;
    for (const auto& kv : p) dp[kv.first] = kv.second.get_d();
    REQUIRE(eval_double(root, dp) == Catch::Approx(std::sqrt(5.0)));
    REQUIRE(eval_double(parse("u2^2/(1+u1^2)^3", v), dp) == Catch::Approx(1.0 / 125.0));
}

TEST_CASE("symbol bookkeeping", "[expr]") {
    JetSpec spec({"x"}, {"u"});
    Vocabulary v = spec.vocab(1);
    Expr e = parse("x*u1 + u", v);
    auto syms = e.symbols();
    REQUIRE(syms.size() == 3);
    REQUIRE(e.depends_on(spec.x(0)));
    REQUIRE(e.depends_on(spec.u(0)));
    REQUIRE_FALSE(parse("x^2", v).depends_on(spec.u(0)));
}
