#include <catch2/catch_amalgamated.hpp>

#include "jetforge/orbits.hpp"
#include "jetforge/parser.hpp"

using namespace jetforge;

namespace {

Expr E(const std::string& s) {
    static JetSpec spec({"x"}, {"u"});
    static Vocabulary v = spec.vocab(0);
    return parse(s, v);
}

Expr E2(const std::string& s) {
    static JetSpec spec({"x", "y"}, {"w"});
    static Vocabulary v = spec.vocab(0);
    return parse(s, v);
}

std::vector<VectorField> rigid_motions_on_curves() {
    JetSpec spec({"x"}, {"u"});
    return {VectorField(spec, {E("1")}, {E("0")}),
            VectorField(spec, {E("0")}, {E("1")}),
            VectorField(spec, {E("-u")}, {E("x")})};
}

std::vector<VectorField> projective_line_fields() {
    JetSpec spec({"x"}, {"u"});
    return {VectorField(spec, {E("1")}, {E("0")}),
            VectorField(spec, {E("x")}, {E("0")}),
            VectorField(spec, {E("x^2")}, {E("0")})};
}

StructureField euclid2() {
    TensorType metric{0, 2, Symmetry::symmetric};
    return StructureField({"x", "y"}, metric, {E2("1"), E2("0"), E2("1")});
}

}  // namespace

TEST_CASE("structure constants of the rigid motion algebra", "[orbits]") {
    auto gens = rigid_motions_on_curves();
    auto c = structure_constants(gens, 5);
    // [e1,e3] = e2 and [e2,e3] = -e1; translations commute
    REQUIRE(c[0][2][0] == 0);
    REQUIRE(c[0][2][1] == 1);
    REQUIRE(c[0][2][2] == 0);
    REQUIRE(c[1][2][0] == Rational(-1));
    REQUIRE(c[1][2][1] == 0);
    REQUIRE(c[0][1][0] == 0);
    REQUIRE(c[0][1][1] == 0);
    REQUIRE(c[0][1][2] == 0);
}

TEST_CASE("bracket closure violations are detected", "[orbits]") {
    JetSpec spec({"x"}, {"u"});
    std::vector<VectorField> bad = {VectorField(spec, {E("1")}, {E("0")}),
                                    VectorField(spec, {E("0")}, {E("x^2")})};
    REQUIRE_THROWS_AS(structure_constants(bad, 5), BracketClosureViolation);
}

TEST_CASE("frame rows carry the prolonged coefficients", "[orbits]") {
    auto f = build_distribution(rigid_motions_on_curves(), 2);
    REQUIRE(f.frame_rows.size() == 3);
    REQUIRE(f.ambient_dim() == 4);

    REQUIRE((f.frame_rows[0][0] - E("1")).is_zero());
    REQUIRE(f.frame_rows[0][1].is_zero());
    REQUIRE(f.frame_rows[0][2].is_zero());
    REQUIRE(f.frame_rows[0][3].is_zero());
    REQUIRE((f.frame_rows[1][1] - E("1")).is_zero());

    JetSpec spec({"x"}, {"u"});
    Expr u1 = Expr::sym(spec.jet(0, MultiIndex(std::vector<std::uint32_t>{1})));
    Expr u2 = Expr::sym(spec.jet(0, MultiIndex(std::vector<std::uint32_t>{2})));
    REQUIRE((f.frame_rows[2][0] - E("-u")).is_zero());
    REQUIRE((f.frame_rows[2][1] - E("x")).is_zero());
    REQUIRE((f.frame_rows[2][2] - (E("1") + u1 * u1)).is_zero());
    REQUIRE((f.frame_rows[2][3] - E("3") * u1 * u2).is_zero());
}

TEST_CASE("orbit codimension growth for rigid motions", "[orbits]") {
    auto gens = rigid_motions_on_curves();
    auto make = [&](std::uint32_t k) { return build_distribution(gens, k); };
    RankReport rep = rank_table(make, 4, 6, 11);

    std::size_t expect_rank[5] = {2, 3, 3, 3, 3};
    std::size_t expect_codim[5] = {0, 0, 1, 2, 3};
    for (std::uint32_t k = 0; k <= 4; ++k) {
        CAPTURE(k);
        REQUIRE(rep.rows[k].rank == expect_rank[k]);
        REQUIRE(rep.rows[k].codim == expect_codim[k]);
        REQUIRE(rep.rows[k].constant_rank);
    }
    REQUIRE(rep.kernel_dims == (std::vector<std::size_t>{1, 0, 0, 0}));
}

TEST_CASE("isotropy kernel filtration stabilizes", "[orbits]") {
    auto gens = rigid_motions_on_curves();
    auto make = [&](std::uint32_t k) { return build_distribution(gens, k); };
    FiltrationReport rep = kernel_filtration(make, 4, 4, 11);

    REQUIRE(rep.rows[0].kernel_dim == 1);
    REQUIRE(rep.rows[0].constant_dim);
    REQUIRE(rep.rows[1].kernel_dim == 0);
    REQUIRE_FALSE(rep.rows[1].matches_prolongation);
    REQUIRE(rep.rows[2].kernel_dim == 0);
    REQUIRE(rep.rows[2].matches_prolongation);
    REQUIRE(rep.rows[3].kernel_dim == 0);
    REQUIRE(rep.rows[3].matches_prolongation);
    REQUIRE(rep.stable_from);
    REQUIRE(*rep.stable_from == 2);
}

TEST_CASE("prolonged frames close under brackets", "[orbits]") {
    REQUIRE(distribution_involutive(rigid_motions_on_curves(), 2, 7));
    REQUIRE(distribution_involutive(projective_line_fields(), 3, 7));
}

TEST_CASE("codimension sequence for the projective line algebra", "[orbits]") {
    // the base orbit already misses the fiber direction, so codim starts at 1
    auto gens = projective_line_fields();
    auto make = [&](std::uint32_t k) { return build_distribution(gens, k); };
    RankReport rep = rank_table(make, 4, 6, 13);
    std::size_t expect_codim[5] = {1, 1, 1, 2, 3};
    for (std::uint32_t k = 0; k <= 4; ++k) {
        CAPTURE(k);
        REQUIRE(rep.rows[k].codim == expect_codim[k]);
    }
}

TEST_CASE("transitivity of finite frames", "[orbits]") {
    REQUIRE(transitivity_check(rigid_motions_on_curves(), 5, 3).transitive);

    JetSpec spec({"x"}, {"u"});
    std::vector<VectorField> only_x = {VectorField(spec, {E("1")}, {E("0")})};
    REQUIRE_FALSE(transitivity_check(only_x, 5, 3).transitive);

    std::vector<BaseField> rigid = {
        BaseField({"x", "y"}, {E2("1"), E2("0")}),
        BaseField({"x", "y"}, {E2("0"), E2("1")}),
        BaseField({"x", "y"}, {E2("-y"), E2("x")})};
    REQUIRE(transitivity_check(rigid, 5, 3).transitive);
}

TEST_CASE("structure mode distribution for the flat metric", "[orbits]") {
    StructureField S = euclid2();
    LinearJetSystem killing = lie_equation(S, 1);
    StructureAction act{{"x", "y"}, S.type};
    auto make = [&](std::uint32_t k) { return build_distribution(killing, act, k); };

    RankReport rep = rank_table(make, 2, 4, 17);
    for (std::uint32_t k = 0; k <= 2; ++k) REQUIRE(rep.rows[k].rank == 3);
    REQUIRE(rep.rows[0].ambient == 5);
    REQUIRE(rep.rows[0].codim == 2);

    REQUIRE(transitivity_check(killing, 1, 5, 17).transitive);
}

TEST_CASE("unconstrained sections have full orbits", "[orbits]") {
    JetSpec total({"bx", "bu"}, {"w1", "w2"});
    LinearJetSystem free_sys{total, 1, {}};
    SectionAction act{JetSpec({"x"}, {"u"})};
    auto make = [&](std::uint32_t k) { return build_distribution(free_sys, act, k); };
    RankReport rep = rank_table(make, 2, 3, 19);
    for (std::uint32_t k = 0; k <= 2; ++k) {
        CAPTURE(k);
        REQUIRE(rep.rows[k].codim == 0);
    }
}

TEST_CASE("rational combinations against an expression basis", "[orbits]") {
    Prng rng(23);
    std::vector<std::vector<Expr>> basis = {{E("1"), E("x")}, {E("x"), E("x^2")}};
    auto c = expr_combination(basis, {E("2+3*x"), E("2*x+3*x^2")}, rng);
    REQUIRE(c);
    REQUIRE((*c)[0] == Rational(2));
    REQUIRE((*c)[1] == Rational(3));

    auto miss = expr_combination(basis, {E("0"), E("1")}, rng);
    REQUIRE_FALSE(miss);

    auto triv = expr_combination({}, {E("0")}, rng);
    REQUIRE(triv);
    REQUIRE(triv->empty());
}
