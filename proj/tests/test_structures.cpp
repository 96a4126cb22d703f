#include <catch2/catch_amalgamated.hpp>

#include "jetforge/structures.hpp"

using namespace jetforge;

namespace {

StructureField euclidean2() {
    return StructureField({"x", "y"}, {0, 2, Symmetry::symmetric},
                          {Expr::from_long(1), Expr(), Expr::from_long(1)});
}

StructureField euclidean3() {
    return StructureField({"x", "y", "z"}, {0, 2, Symmetry::symmetric},
                          {Expr::from_long(1), Expr(), Expr(), Expr::from_long(1),
                           Expr(), Expr::from_long(1)});
}

StructureField volume2() {
    return StructureField({"x", "y"}, {0, 2, Symmetry::antisymmetric},
                          {Expr::from_long(1)});
}

StructureField sphere2() {
    JetSpec bs({"x", "y"}, {"sdep"});
    Vocabulary v;
    v.add(bs.x(0));
    v.add(bs.x(1));
    Expr conf = parse("4/(1+x^2+y^2)^2", v);
    return StructureField({"x", "y"}, {0, 2, Symmetry::symmetric},
                          {conf, Expr(), conf});
}

Vocabulary plane_vocab() {
    JetSpec bs({"x", "y"}, {"pdep"});
    Vocabulary v;
    v.add(bs.x(0));
    v.add(bs.x(1));
    return v;
}

PolyJet map_jet2(const std::vector<Expr>& comps, const std::vector<Rational>& at,
                 std::uint32_t k) {
    JetSpec ms({"x", "y"}, {"m1", "m2"});
    return jet_of_section(comps, at, k, ms);
}

}  // namespace

TEST_CASE("tensor component bookkeeping", "[structures]") {
    TensorType metric{0, 2, Symmetry::symmetric};
    REQUIRE(tensor_fiber_dim(metric, 2) == 3);
    auto names = tensor_component_names(metric, 2);
    REQUIRE(names[0] == "w11");
    REQUIRE(names[1] == "w12");
    REQUIRE(names[2] == "w22");
    REQUIRE(tensor_fiber_dim({0, 2, Symmetry::antisymmetric}, 2) == 1);
    REQUIRE(tensor_fiber_dim({1, 0, Symmetry::none}, 3) == 3);
}

TEST_CASE("lie derivative of a covariant structure", "[structures]") {
    Vocabulary v = plane_vocab();
    TensorType metric{0, 2, Symmetry::symmetric};
    StructureField g({"x", "y"}, metric,
                     {Expr::from_long(1), Expr(), Expr::from_long(1)});
    BaseField rot({"x", "y"}, {parse("-y", v), parse("x", v)});
    BaseField scl({"x", "y"}, {parse("x", v), parse("y", v)});

    StructureField lg = lie_derivative(rot, g);
    REQUIRE(lg.comps[0].is_zero());
    REQUIRE(lg.comps[1].is_zero());
    REQUIRE(lg.comps[2].is_zero());

    StructureField ls = lie_derivative(scl, g);
    REQUIRE(ls.comps[0] == Expr::from_long(2));
    REQUIRE(ls.comps[1].is_zero());
    REQUIRE(ls.comps[2] == Expr::from_long(2));
}

TEST_CASE("lie derivative satisfies the bracket law", "[structures]") {
    Vocabulary v = plane_vocab();
    SymbolId x = intern_base("x", 0), y = intern_base("y", 1);
    TensorType metric{0, 2, Symmetry::symmetric};
    StructureField gv({"x", "y"}, metric,
                      {parse("1+x^2", v), parse("x*y", v), parse("1+y^2", v)});
    BaseField rot({"x", "y"}, {parse("-y", v), parse("x", v)});
    BaseField shv({"x", "y"}, {parse("y^2", v), parse("x", v)});

    std::vector<Expr> bx;
    for (std::size_t i = 0; i < 2; ++i) {
        Expr a = rot.xi[0] * diff(shv.xi[i], x) + rot.xi[1] * diff(shv.xi[i], y);
        Expr b = shv.xi[0] * diff(rot.xi[i], x) + shv.xi[1] * diff(rot.xi[i], y);
        bx.push_back(a - b);
    }
    BaseField br({"x", "y"}, bx);

    StructureField lhs = lie_derivative(br, gv);
    StructureField rhs1 = lie_derivative(rot, lie_derivative(shv, gv));
    StructureField rhs2 = lie_derivative(shv, lie_derivative(rot, gv));
    for (std::size_t c = 0; c < 3; ++c)
        REQUIRE(lhs.comps[c] == rhs1.comps[c] - rhs2.comps[c]);
}

TEST_CASE("tensor lift vertical defect", "[structures]") {
    // along the section the lift's vertical part differs from transport by -L_v S
    Vocabulary v = plane_vocab();
    TensorType metric{0, 2, Symmetry::symmetric};
    StructureField gv({"x", "y"}, metric,
                      {parse("1+x^2", v), parse("x*y", v), parse("1+y^2", v)});
    BaseField shv({"x", "y"}, {parse("y^2", v), parse("x", v)});

    VectorField lift = tensor_lift(shv, metric);
    JetSpec bundle = structure_bundle(gv);
    Bindings at;
    for (std::size_t c = 0; c < 3; ++c) at[bundle.u(c)] = gv.comps[c];
    StructureField lv = lie_derivative(shv, gv);
    for (std::size_t c = 0; c < 3; ++c) {
        Expr vertical = subs(lift.phi[c], at);
        Expr transport;
        for (std::size_t k = 0; k < 2; ++k)
            transport = transport + shv.xi[k] * diff(gv.comps[c], gv.xs[k]);
        REQUIRE(vertical - transport == -lv.comps[c]);
    }
}

TEST_CASE("tensor transport goldens", "[structures]") {
    TensorType metric{0, 2, Symmetry::symmetric};
    StructureField g = euclidean2();
    Vocabulary v = plane_vocab();

    SECTION("a rotation fixes the flat metric") {
        JetSpec map_spec({"x", "y"}, {"z1", "z2"});
        auto mv = map_spec.vocab(0);
        PolyJet Z = jet_of_section({parse("(3/5)*x - (4/5)*y", mv),
                                    parse("(4/5)*x + (3/5)*y", mv)},
                                   {Rational(1), Rational(2)}, 2, map_spec);
        PolyJet jS = structure_jet(g, {Rational(1), Rational(2)}, 1);
        PolyJet moved = tensor_transport(Z, jS, metric);
        REQUIRE(moved.target[0] == 1);
        REQUIRE(moved.target[1] == 0);
        REQUIRE(moved.target[2] == 1);
        for (const auto& s : moved.dev) REQUIRE(s.terms.empty());
    }

    SECTION("a dilation scales the metric by the inverse square") {
        JetSpec map_spec({"x", "y"}, {"z1", "z2"});
        auto mv = map_spec.vocab(0);
        PolyJet Z = jet_of_section({parse("2*x", mv), parse("2*y", mv)},
                                   {Rational(0), Rational(0)}, 1, map_spec);
        PolyJet jS = structure_jet(g, {Rational(0), Rational(0)}, 0);
        PolyJet moved = tensor_transport(Z, jS, metric);
        REQUIRE(moved.target[0] == Rational(1, 4));
        REQUIRE(moved.target[1] == 0);
        REQUIRE(moved.target[2] == Rational(1, 4));
    }

    SECTION("an area form picks up the inverse jacobian determinant") {
        TensorType vol{0, 2, Symmetry::antisymmetric};
        StructureField w({"x", "y"}, vol, {Expr::from_long(1)});
        JetSpec map_spec({"x", "y"}, {"z1", "z2"});
        auto mv = map_spec.vocab(0);
        PolyJet Z = jet_of_section({parse("2*x", mv), parse("y", mv)},
                                   {Rational(0), Rational(0)}, 1, map_spec);
        PolyJet jS = structure_jet(w, {Rational(0), Rational(0)}, 0);
        PolyJet moved = tensor_transport(Z, jS, vol);
        REQUIRE(moved.target[0] == Rational(1, 2));
    }
}

TEST_CASE("infinitesimal automorphism fibers", "[structures]") {
    StructureField g2 = euclidean2();
    StructureField vol = volume2();

    LinearJetSystem k1 = psi_S(g2);
    REQUIRE(k1.equations.size() == 3);
    Point origin = bind_base(k1.vfspec, {Rational(0), Rational(0)});
    Point pt = bind_base(k1.vfspec, {Rational(1), Rational(1, 2)});
    REQUIRE(k1.solution_dim(origin) == 3);
    REQUIRE(k1.solution_dim(pt) == 3);

    LinearJetSystem v1 = psi_S(vol);
    REQUIRE(v1.equations.size() == 1);
    REQUIRE(v1.solution_dim(bind_base(v1.vfspec, {Rational(2), Rational(-3)})) == 5);

    // the zero structure constrains nothing
    StructureField zero({"x", "y"}, {0, 2, Symmetry::symmetric},
                        {Expr(), Expr(), Expr()});
    LinearJetSystem z1 = psi_S(zero);
    REQUIRE(z1.fiber_rank(origin) == 0);
    REQUIRE(z1.solution_dim(origin) == 6);

    // isotropy at the origin
    REQUIRE(isotropy_fiber(k1, origin).size() == 1);
    REQUIRE(isotropy_fiber(v1, origin).size() == 3);
}

TEST_CASE("rigid motion dimensions in two and three dimensions", "[structures]") {
    StructureField g2 = euclidean2();
    LinearJetSystem k2 = lie_equation(g2, 2);
    Point pt = bind_base(k2.vfspec, {Rational(1), Rational(1, 2)});
    REQUIRE(k2.solution_dim(pt) == 3);

    StructureField g3 = euclidean3();
    LinearJetSystem e3 = lie_equation(g3, 2);
    Point p3 = bind_base(e3.vfspec, {Rational(1), Rational(0), Rational(-1)});
    REQUIRE(e3.solution_dim(p3) == 6);

    // divergence-free fields gain fiber dimensions with each order
    StructureField vol = volume2();
    Point origin = bind_base(psi_S(vol).vfspec, {Rational(0), Rational(0)});
    LinearJetSystem v2 = prolong_system(psi_S(vol), 1);
    REQUIRE(v2.solution_dim(origin) == 9);
}

TEST_CASE("system prolongation commutes with assembly", "[structures]") {
    StructureField g2 = euclidean2();
    LinearJetSystem a = lie_equation(g2, 3);
    LinearJetSystem b = prolong_system(lie_equation(g2, 2), 1);
    Prng rng(7);
    for (int t = 0; t < 5; ++t) {
        Point q;
        q[a.vfspec.x(0)] = rng.small_rational();
        q[a.vfspec.x(1)] = rng.small_rational();
        MatQ ma = a.fiber_matrix(q), mb = b.fiber_matrix(q);
        std::vector<VecQ> ra, rb;
        for (std::size_t r = 0; r < ma.rows; ++r) ra.push_back(ma.row(r));
        for (std::size_t r = 0; r < mb.rows; ++r) rb.push_back(mb.row(r));
        REQUIRE(subspace_equal(ra, rb));
    }
}

TEST_CASE("solution jets satisfy the equations exactly", "[structures]") {
    StructureField g2 = euclidean2();
    LinearJetSystem k2 = lie_equation(g2, 2);
    Point pt = bind_base(k2.vfspec, {Rational(1), Rational(1, 2)});
    JetSpec vs = k2.vfspec;

    Expr mx = -Expr::sym(vs.x(1)), my = Expr::sym(vs.x(0));
    PolyJet rot = jet_of_section({mx, my}, {Rational(1), Rational(1, 2)}, 2, vs);
    VecQ vals = section_jet_coordinates(rot, vs, 2);
    MatQ m = k2.fiber_matrix(pt);
    for (std::size_t r = 0; r < m.rows; ++r) {
        Rational acc(0);
        for (std::size_t c = 0; c < m.cols; ++c) acc += m.at(r, c) * vals[c];
        REQUIRE(acc == 0);
    }

    // a non-solution leaves a residue in at least one equation
    PolyJet bad = jet_of_section({Expr::sym(vs.x(0)), Expr()},
                                 {Rational(1), Rational(1, 2)}, 2, vs);
    VecQ badv = section_jet_coordinates(bad, vs, 2);
    bool nonzero = false;
    for (std::size_t r = 0; r < m.rows; ++r) {
        Rational acc(0);
        for (std::size_t c = 0; c < m.cols; ++c) acc += m.at(r, c) * badv[c];
        if (acc != 0) nonzero = true;
    }
    REQUIRE(nonzero);
}

TEST_CASE("finite automorphism tests", "[structures]") {
    StructureField g2 = euclidean2();
    StructureField vol = volume2();
    Vocabulary v = plane_vocab();

    PolyJet idj = PolyJet::identity({Rational(0), Rational(0)}, 2);
    REQUIRE(automorphism_test(idj, g2, 1));

    PolyJet rotj = map_jet2({parse("3/5*x-4/5*y", v), parse("4/5*x+3/5*y", v)},
                            {Rational(0), Rational(0)}, 2);
    REQUIRE(automorphism_test(rotj, g2, 1));

    PolyJet sclj = map_jet2({parse("2*x", v), parse("2*y", v)},
                            {Rational(0), Rational(0)}, 2);
    REQUIRE_FALSE(automorphism_test(sclj, g2, 1));

    // rotations preserve the round conformal metric away from the origin
    StructureField sph = sphere2();
    PolyJet rots = map_jet2({parse("3/5*x-4/5*y", v), parse("4/5*x+3/5*y", v)},
                            {Rational(1), Rational(2)}, 3);
    REQUIRE(automorphism_test(rots, sph, 2));
    PolyJet trs = map_jet2({parse("x+1", v), parse("y", v)},
                           {Rational(0), Rational(0)}, 3);
    REQUIRE_FALSE(automorphism_test(trs, sph, 2));

    // a nonlinear shear preserves the area form
    PolyJet shear = map_jet2({parse("x+y^2/2", v), parse("y", v)},
                             {Rational(1), Rational(1)}, 2);
    REQUIRE(automorphism_test(shear, vol, 1));
}

TEST_CASE("structure pullback goldens", "[structures]") {
    StructureField g2 = euclidean2();

    SECTION("one dimensional stretch") {
        StructureField line({"x"}, {0, 2, Symmetry::symmetric}, {Expr::from_long(1)});
        JetSpec ls({"x"}, {"m1"});
        Vocabulary lv;
        lv.add(ls.x(0));
        PolyJet offj = jet_of_section({parse("2*x", lv)}, {Rational(0)}, 1, ls);
        PolyJet pb = phi_S(offj, line, 0);
        REQUIRE(pb.target.size() == 1);
        REQUIRE(pb.target[0] == Rational(4));
    }

    SECTION("identity map gives the structure jet back") {
        PolyJet idj = PolyJet::identity({Rational(1), Rational(-2)}, 3);
        PolyJet pb = phi_S(idj, g2, 2);
        REQUIRE(jets_identical(pb, structure_jet(g2, {Rational(1), Rational(-2)}, 2)));
    }
}

TEST_CASE("pullback covariance under composition", "[structures]") {
    StructureField g2 = euclidean2();
    Vocabulary v = plane_vocab();

    PolyJet Y = map_jet2({parse("2*x-y+y^2/5", v), parse("x+3*y-x^2/7", v)},
                         {Rational(1), Rational(1)}, 2);
    PolyJet X = map_jet2({parse("x+y+x^2/3", v), parse("y-x+x*y/2", v)},
                         Y.target, 2);
    PolyJet XY = polyjet_compose(X, Y);
    PolyJet lhs = phi_S(XY, g2, 1);
    PolyJet rhs = tensor_transport(polyjet_invert(Y), phi_S(X, g2, 1), g2.type);
    REQUIRE(jets_identical(lhs, rhs));
}

TEST_CASE("top order extension systems", "[structures]") {
    StructureField g2 = euclidean2();
    StructureField vol = volume2();
    Vocabulary v = plane_vocab();

    PolyJet id1 = PolyJet::identity({Rational(0), Rational(0)}, 1);
    AffineSystem killing_top = nonlinear_symbol_system(id1, g2, 1);
    REQUIRE(killing_top.unknowns.size() == 6);
    REQUIRE(killing_top.solution_dim());
    REQUIRE(*killing_top.solution_dim() == 0);
    VecQ sol = *killing_top.particular();
    for (const auto& c : sol) REQUIRE(c == 0);

    AffineSystem vol_top = nonlinear_symbol_system(id1, vol, 1);
    REQUIRE(*vol_top.solution_dim() == 4);

    // the solution set is affine: particular plus homogeneous stays a solution
    VecQ p = *vol_top.particular();
    auto hb = vol_top.homogeneous_basis();
    REQUIRE(hb.size() == 4);
    VecQ shifted = p;
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += hb[0][i] + hb[1][i];
    for (std::size_t r = 0; r < vol_top.A.rows; ++r) {
        Rational acc(0);
        for (std::size_t c = 0; c < vol_top.A.cols; ++c)
            acc += vol_top.A.at(r, c) * shifted[c];
        REQUIRE(acc == vol_top.rhs[r]);
    }

    // a rotation extends with the unique top correction zero
    PolyJet rot1 = map_jet2({parse("3/5*x-4/5*y", v), parse("4/5*x+3/5*y", v)},
                            {Rational(0), Rational(0)}, 1);
    AffineSystem rot_top = nonlinear_symbol_system(rot1, g2, 1);
    REQUIRE(rot_top.solution_dim());
    REQUIRE(*rot_top.solution_dim() == 0);

    // a non-automorphism base jet is rejected up front
    PolyJet scl1 = map_jet2({parse("2*x", v), parse("2*y", v)},
                            {Rational(0), Rational(0)}, 1);
    REQUIRE_THROWS_AS(nonlinear_symbol_system(scl1, g2, 1), PrerequisiteNotAutomorphism);
}

TEST_CASE("rank sampling stays constant on homogeneous structures", "[structures]") {
    LinearJetSystem k1 = psi_S(euclidean2());
    Prng r2(99);
    RegularityReport rep = sample_ranks(k1, r2, 10);
    REQUIRE(rep.constant_rank);
    REQUIRE(rep.ranks.front() == 3);

    Prng r3(100);
    RegularityReport rs = sample_ranks(psi_S(sphere2()), r3, 10);
    REQUIRE(rs.constant_rank);
    REQUIRE(rs.ranks.front() == 3);
}
