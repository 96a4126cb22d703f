#ifndef JETFORGE_AUTOTEST_HPP
#define JETFORGE_AUTOTEST_HPP

// Built-in verification suite. Each check exercises one advertised property
// of the library end to end, from classical prolongation coefficients to the
// finite-generation test for differential invariants. The CLI exposes the
// suite as the `autotest` command; the test harness reuses the same runners.
// Every check is deterministic for a fixed seed.

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <jetforge/errors.hpp>
#include <jetforge/expr.hpp>
#include <jetforge/invariants.hpp>
#include <jetforge/jetspace.hpp>
#include <jetforge/linalg.hpp>
#include <jetforge/orbits.hpp>
#include <jetforge/parser.hpp>
#include <jetforge/polyjet.hpp>
#include <jetforge/prng.hpp>
#include <jetforge/prolongation.hpp>
#include <jetforge/spencer.hpp>
#include <jetforge/structures.hpp>

namespace jetforge {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace autotest_detail {

// Random polynomial of total degree <= 2 in the given symbols, with small
// rational coefficients. Used wherever a check needs generic input data.
inline Expr random_poly2(Prng& rng, const std::vector<SymbolId>& vars,
                         long num_range = 3, long den_range = 2) {
    std::vector<Expr> mons;
    mons.push_back(Expr::from_long(1));
    for (SymbolId v : vars) mons.push_back(Expr::sym(v));
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = i; j < vars.size(); ++j)
            mons.push_back(Expr::sym(vars[i]) * Expr::sym(vars[j]));
    Expr out;
    for (const auto& m : mons)
        out = out + Expr::from_rational(rng.small_rational(num_range, den_range)) * m;
    return out;
}

inline StructureField euclidean2() {
    return StructureField({"x", "y"}, {0, 2, Symmetry::symmetric},
                          {Expr::from_long(1), Expr(), Expr::from_long(1)});
}

inline StructureField euclidean3() {
    return StructureField({"x", "y", "z"}, {0, 2, Symmetry::symmetric},
                          {Expr::from_long(1), Expr(), Expr(),
                           Expr::from_long(1), Expr(), Expr::from_long(1)});
}

inline StructureField volume2() {
    return StructureField({"x", "y"}, {0, 2, Symmetry::antisymmetric},
                          {Expr::from_long(1)});
}

// Plane rigid motions acting on curve jets: the running example throughout.
inline std::vector<VectorField> rigid_motions_on_curves() {
    JetSpec spec({"x"}, {"u"});
    Vocabulary v = spec.vocab(0);
    return {VectorField(spec, {parse("1", v)}, {parse("0", v)}),
            VectorField(spec, {parse("0", v)}, {parse("1", v)}),
            VectorField(spec, {parse("-u", v)}, {parse("x", v)})};
}

inline bool prolonged_fields_equal(const ProlongedField& a, const ProlongedField& b,
                                   const JetSpec& spec, std::uint32_t k) {
    for (std::size_t i = 0; i < spec.base_dim(); ++i)
        if (!(a.xi(i) - b.xi(i)).is_zero()) return false;
    for (std::uint32_t h = 0; h <= k; ++h)
        for (const auto& J : multi_indices_of_order(spec.base_dim(), h))
            for (std::size_t mu = 0; mu < spec.fiber_dim(); ++mu)
                if (!(a.coeff(mu, J) - b.coeff(mu, J)).is_zero()) return false;
    return true;
}

inline std::string fmt_double(double x) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << x;
    return os.str();
}

}  // namespace autotest_detail

// 1. Prolongation coefficients of the rotation and scaling fields on curve
// jets match the classical closed forms, exactly.
inline CheckResult check_classical_prolongation() {
    CheckResult r{"classical-prolongation-coefficients", false, ""};
    JetSpec spec({"x"}, {"u"});
    Vocabulary v0 = spec.vocab(0);
    Vocabulary v2 = spec.vocab(2);
    MultiIndex J1(std::vector<std::uint32_t>{1});
    MultiIndex J2(std::vector<std::uint32_t>{2});

    VectorField rot(spec, {parse("-u", v0)}, {parse("x", v0)});
    ProlongedField pr(rot, 2);
    bool ok = (pr.coeff(0, J1) - parse("1+u1^2", v2)).is_zero() &&
              (pr.coeff(0, J2) - parse("3*u1*u2", v2)).is_zero();

    VectorField scl(spec, {parse("x", v0)}, {parse("u", v0)});
    ProlongedField ps(scl, 2);
    ok = ok && ps.coeff(0, J1).is_zero() &&
         (ps.coeff(0, J2) - parse("-u2", v2)).is_zero();

    r.passed = ok;
    r.detail = ok ? "rotation and scaling coefficients match closed forms"
                  : "coefficient mismatch";
    return r;
}

// 2. Numeric flow transport agrees with the symbolic prolongation at order 3
// for randomly drawn polynomial fields and sections.
inline CheckResult check_flow_consistency(std::uint64_t seed) {
    CheckResult r{"flow-consistency", false, ""};
    JetSpec spec({"x"}, {"u"});
    std::vector<SymbolId> xu = {spec.x(0), spec.u(0)};
    Prng rng(seed);
    double worst = 0.0;
    int failures = 0;
    // Coefficients stay in [-1, 1]: the numeric oracle differentiates the
    // flow, and wild quadratic fields blow up inside the sampling window.
    for (int trial = 0; trial < 20; ++trial) {
        VectorField vf(spec, {autotest_detail::random_poly2(rng, xu, 1, 2)},
                       {autotest_detail::random_poly2(rng, xu, 1, 2)});
        Expr section = autotest_detail::random_poly2(rng, {spec.x(0)}, 1, 2);
        Rational x0 = rng.small_rational(1, 2);
        FlowCheckReport rep = flow_check(vf, {section}, {x0}, 3, 1.0 / 256, 1e-5);
        if (!rep.passed) ++failures;
        if (rep.max_error > worst) worst = rep.max_error;
    }
    r.passed = failures == 0;
    r.detail = "20 random fields at order 3, worst error " +
               autotest_detail::fmt_double(worst);
    if (failures) r.detail += ", " + std::to_string(failures) + " failed";
    return r;
}

// 3. Prolongation is a Lie algebra morphism: the prolonged bracket equals the
// jet-space bracket of the prolongations, as an exact identity.
inline CheckResult check_bracket_morphism(std::uint64_t seed) {
    CheckResult r{"bracket-morphism", false, ""};
    JetSpec spec({"x"}, {"u"});
    std::vector<SymbolId> xu = {spec.x(0), spec.u(0)};
    Prng rng(seed);
    int failures = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::uint32_t k = static_cast<std::uint32_t>(trial % 4);
        VectorField v(spec, {autotest_detail::random_poly2(rng, xu)},
                      {autotest_detail::random_poly2(rng, xu)});
        VectorField w(spec, {autotest_detail::random_poly2(rng, xu)},
                      {autotest_detail::random_poly2(rng, xu)});
        ProlongedField direct(bracket(v, w), k);
        ProlongedField nested = jet_bracket(prolong(v, k + 1), prolong(w, k + 1));
        if (!autotest_detail::prolonged_fields_equal(direct, nested, spec, k))
            ++failures;
    }
    r.passed = failures == 0;
    r.detail = failures == 0 ? "20 random pairs, orders 0..3, exact"
                             : std::to_string(failures) + " pairs mismatched";
    return r;
}

// 4. Isometry equations of flat metrics have the classical solution
// dimensions, and the order-1 symbol dies after one prolongation.
inline CheckResult check_isometry_dimensions(std::uint64_t seed) {
    CheckResult r{"isometry-solution-dimensions", false, ""};
    Prng rng(seed);
    StructureField g2 = autotest_detail::euclidean2();
    StructureField g3 = autotest_detail::euclidean3();

    LinearJetSystem e2 = lie_equation(g2, 2);
    Point at2 = bind_base(e2.vfspec, {rng.small_rational(), rng.small_rational()});
    std::size_t d2 = e2.solution_dim(at2);

    LinearJetSystem e3 = lie_equation(g3, 2);
    Point at3 = bind_base(e3.vfspec, {rng.small_rational(), rng.small_rational(),
                                      rng.small_rational()});
    std::size_t d3 = e3.solution_dim(at3);

    LinearJetSystem f2 = lie_equation(g2, 1);
    LinearJetSystem f3 = lie_equation(g3, 1);
    std::size_t p2 = algebraic_prolong(symbol_of(f2, bind_base(f2.vfspec, {Rational(0), Rational(0)}))).dim();
    std::size_t p3 = algebraic_prolong(symbol_of(f3, bind_base(f3.vfspec, {Rational(0), Rational(0), Rational(0)}))).dim();

    r.passed = d2 == 3 && d3 == 6 && p2 == 0 && p3 == 0;
    r.detail = "solution dims " + std::to_string(d2) + "," + std::to_string(d3) +
               "; prolonged symbol dims " + std::to_string(p2) + "," +
               std::to_string(p3);
    return r;
}

// 5. The symbol of the automorphism equation at order 1+k is the k-th
// algebraic prolongation of the order-1 symbol, exactly.
inline CheckResult check_symbol_prolongation(std::uint64_t seed) {
    CheckResult r{"symbol-prolongation-identity", false, ""};
    Prng rng(seed);
    std::vector<StructureField> fields = {autotest_detail::euclidean2(),
                                          autotest_detail::volume2()};
    int checked = 0;
    for (const auto& S : fields) {
        LinearJetSystem base = lie_equation(S, 1);
        std::vector<Rational> pt;
        for (std::size_t i = 0; i < S.base.size(); ++i)
            pt.push_back(rng.small_rational());
        SymbolSpace g1 = symbol_of(base, bind_base(base.vfspec, pt));
        for (std::uint32_t k = 1; k <= 3; ++k) {
            LinearJetSystem high = lie_equation(S, 1 + k);
            SymbolSpace lhs = symbol_of(high, bind_base(high.vfspec, pt));
            SymbolSpace rhs = algebraic_prolong(g1, k);
            if (!symbols_equal(lhs, rhs)) {
                r.detail = "mismatch at order " + std::to_string(1 + k);
                return r;
            }
            ++checked;
        }
    }
    r.passed = true;
    r.detail = std::to_string(checked) + " symbol identities, two structures";
    return r;
}

// 6. Raising the order of the automorphism equation agrees with prolonging
// the lower-order system: identical equation row spaces at random points.
inline CheckResult check_system_prolongation(std::uint64_t seed) {
    CheckResult r{"system-prolongation-row-spaces", false, ""};
    Prng rng(seed);
    std::vector<StructureField> fields = {autotest_detail::euclidean2(),
                                          autotest_detail::volume2()};
    int checked = 0;
    for (const auto& S : fields)
        for (std::uint32_t q = 1; q <= 3; ++q)
            for (std::uint32_t h = 1; q + h <= 4; ++h) {
                LinearJetSystem direct = lie_equation(S, q + h);
                LinearJetSystem stepped = prolong_system(lie_equation(S, q), h);
                for (int s = 0; s < 5; ++s) {
                    std::vector<Rational> pt;
                    for (std::size_t i = 0; i < S.base.size(); ++i)
                        pt.push_back(rng.small_rational());
                    Point at = bind_base(direct.vfspec, pt);
                    auto a = row_space_basis(direct.fiber_matrix(at));
                    auto b = row_space_basis(stepped.fiber_matrix(at));
                    if (a != b) {
                        r.detail = "row spaces differ at order " +
                                   std::to_string(q + h);
                        return r;
                    }
                    ++checked;
                }
            }
    r.passed = true;
    r.detail = std::to_string(checked) + " point comparisons, orders up to 4";
    return r;
}

// 7. The structure pullback is covariant for jet composition: pulling back
// along a composite equals transporting the pullback through the inverse.
inline CheckResult check_pullback_covariance(std::uint64_t seed) {
    CheckResult r{"pullback-covariance", false, ""};
    StructureField g2 = autotest_detail::euclidean2();
    JetSpec ms({"x", "y"}, {"m1", "m2"});
    std::vector<SymbolId> xy = {ms.x(0), ms.x(1)};
    Prng rng(seed);

    // The Jacobian at the base point mixes the linear coefficients with
    // derivatives of the higher terms, so invertibility is tested by
    // attempting the inversion and redrawing on failure.
    auto random_map_jet = [&](const std::vector<Rational>& at) {
        while (true) {
            Rational a = rng.small_rational(3, 2), b = rng.small_rational(3, 2);
            Rational c = rng.small_rational(3, 2), d = rng.small_rational(3, 2);
            if (a * d - b * c == 0) continue;
            Expr lin1 = Expr::from_rational(a) * Expr::sym(ms.x(0)) +
                        Expr::from_rational(b) * Expr::sym(ms.x(1));
            Expr lin2 = Expr::from_rational(c) * Expr::sym(ms.x(0)) +
                        Expr::from_rational(d) * Expr::sym(ms.x(1));
            Expr q1 = autotest_detail::random_poly2(rng, xy);
            Expr q2 = autotest_detail::random_poly2(rng, xy);
            Expr cube = Expr::sym(ms.x(0)) * Expr::sym(ms.x(0)) * Expr::sym(ms.x(1));
            PolyJet jet = jet_of_section(
                {lin1 + q1 * Expr::sym(ms.x(0)) * Expr::sym(ms.x(0)),
                 lin2 + q2 * cube},
                at, 3, ms);
            try {
                polyjet_invert(jet);
                return jet;
            } catch (const SingularLinearPart&) {
            }
        }
    };

    int checked = 0;
    for (int pair = 0; pair < 10; ++pair) {
        PolyJet Y = random_map_jet({rng.small_rational(2, 2), rng.small_rational(2, 2)});
        PolyJet X = random_map_jet(Y.target);
        // transport consumes a map jet of exactly one order above the tensor
        for (std::uint32_t k = 0; k <= 2; ++k) {
            PolyJet Yk = Y.truncated(k + 1);
            PolyJet Xk = X.truncated(k + 1);
            PolyJet XY = polyjet_compose(Xk, Yk);
            PolyJet lhs = phi_S(XY, g2, k);
            PolyJet rhs = tensor_transport(polyjet_invert(Yk), phi_S(Xk, g2, k),
                                           g2.type);
            if (!jets_identical(lhs, rhs)) {
                r.detail = "covariance fails at order " + std::to_string(k);
                return r;
            }
            ++checked;
        }
    }
    r.passed = true;
    r.detail = std::to_string(checked) + " composite pullbacks, orders 0..2";
    return r;
}

// 8. Orbit codimensions of plane rigid motions on curve jets follow the
// classical profile, and the isotropy kernel filtration stabilizes early.
inline CheckResult check_orbit_codimensions(std::uint64_t seed) {
    CheckResult r{"orbit-codimension-profile", false, ""};
    auto gens = autotest_detail::rigid_motions_on_curves();
    auto make = [&](std::uint32_t k) { return build_distribution(gens, k); };
    RankReport ranks = rank_table(make, 4, 10, seed);
    std::vector<std::size_t> expect = {0, 0, 1, 2, 3};
    std::string got;
    bool ok = ranks.rows.size() == expect.size();
    for (std::size_t i = 0; i < ranks.rows.size(); ++i) {
        if (i) got += ",";
        got += std::to_string(ranks.rows[i].codim);
        ok = ok && ranks.rows[i].codim == expect[i] && ranks.rows[i].constant_rank;
    }
    FiltrationReport filt = kernel_filtration(make, 4, 10, seed + 1);
    bool stable = filt.stable_from.has_value() && *filt.stable_from <= 3;
    r.passed = ok && stable;
    r.detail = "codims " + got + "; filtration stable from " +
               (filt.stable_from ? std::to_string(*filt.stable_from)
                                 : std::string("never"));
    return r;
}

// 9. Invariant machinery on curves under rigid motions: squared curvature
// verifies symbolically, the degree-6 search finds exactly its line, and the
// admissibility test separates the arclength derivation from the naive one.
inline CheckResult check_invariant_suite(std::uint64_t seed) {
    CheckResult r{"curve-invariant-suite", false, ""};
    auto gens = autotest_detail::rigid_motions_on_curves();
    const JetSpec& spec = gens[0].spec;
    Vocabulary v = spec.vocab(2);
    Expr kappa2 = parse("u2^2/(1+u1^2)^3", v);

    if (!verify_invariant(InvariantCandidate{2, kappa2}, gens)) {
        r.detail = "squared curvature fails symbolic verification";
        return r;
    }
    auto found = search_invariants(gens, 2, 6, parse("(1+u1^2)^3", v), seed);
    bool search_ok =
        found.size() == 1 && (found[0].expr - kappa2).is_zero();
    if (!search_ok) {
        r.detail = "search returned " + std::to_string(found.size()) +
                   " candidates";
        return r;
    }
    FormalDerivation arclen{{parse("(1+u1^2)^(-1/2)", v)}, 1};
    FormalDerivation naive{{Expr::from_long(1)}, 0};
    bool adm_ok = admissibility_test(arclen, gens) && !admissibility_test(naive, gens);
    r.passed = adm_ok;
    r.detail = adm_ok ? "verified, searched, and admissibility separated"
                      : "admissibility test misclassified a derivation";
    return r;
}

// 10. Squared curvature and its arclength derivatives span the orbit
// codimension at the next two orders: the invariant algebra is finitely
// generated by one invariant and one derivation.
inline CheckResult check_invariant_finiteness(std::uint64_t seed) {
    CheckResult r{"invariant-span-finiteness", false, ""};
    auto gens = autotest_detail::rigid_motions_on_curves();
    const JetSpec& spec = gens[0].spec;
    Vocabulary v = spec.vocab(2);
    InvariantCandidate kappa2{2, parse("u2^2/(1+u1^2)^3", v)};
    FormalDerivation arclen{{parse("(1+u1^2)^(-1/2)", v)}, 1};

    FinitenessReport lo = finiteness_span_check(
        {kappa2}, {arclen}, build_distribution(gens, 3), 10, seed);
    InvariantCandidate dkappa2 = formal_derive(arclen, kappa2, spec);
    FinitenessReport hi = finiteness_span_check(
        {kappa2, dkappa2}, {arclen}, build_distribution(gens, 4), 10, seed + 1);

    r.passed = lo.pass && hi.pass;
    r.detail = "orders 2->3 " + std::string(lo.pass ? "pass" : "fail") +
               ", 3->4 " + std::string(hi.pass ? "pass" : "fail");
    return r;
}

// 11. The symbol coboundary squares to zero, its rank-nullity bookkeeping on
// full symmetric modules is exact, the flat comparison operator vanishes on
// holonomic families, and restriction commutes with it on random inputs.
inline CheckResult check_symbol_complex(std::uint64_t seed) {
    CheckResult r{"symbol-complex-identities", false, ""};

    for (std::size_t n = 1; n <= 3; ++n)
        for (std::uint32_t q = 2; q <= 4; ++q)
            for (std::size_t p = 0; p + 1 <= n; ++p) {
                DeltaMap d1 = delta_map(n, 2, q, p);
                DeltaMap d2 = delta_map(n, 2, q - 1, p + 1);
                for (std::size_t row = 0; row < d2.matrix.rows; ++row)
                    for (std::size_t col = 0; col < d1.matrix.cols; ++col) {
                        Rational acc(0);
                        for (std::size_t m = 0; m < d1.matrix.rows; ++m)
                            acc += d2.matrix.at(row, m) * d1.matrix.at(m, col);
                        if (acc != 0) {
                            r.detail = "coboundary square is nonzero";
                            return r;
                        }
                    }
            }

    for (std::size_t n = 2; n <= 3; ++n)
        for (std::uint32_t q = 1; q <= 3; ++q)
            for (std::size_t p = 1; p < n; ++p) {
                DeltaMap d = delta_map(n, 2, q, p);
                DeltaMap prev = delta_map(n, 2, q + 1, p - 1);
                std::size_t kerdim = d.matrix.cols - rank(d.matrix);
                if (kerdim != rank(prev.matrix)) {
                    r.detail = "rank-nullity mismatch on the full module";
                    return r;
                }
            }

    // Flat comparison operator on explicit holonomic families.
    {
        JetSpec sp({"x"}, {"u"});
        Vocabulary v = sp.vocab(0);
        auto zero_rows = [](const std::vector<std::vector<Expr>>& rows) {
            for (const auto& row : rows)
                for (const auto& e : row)
                    if (!e.is_zero()) return false;
            return true;
        };
        if (!zero_rows(spencer_D({parse("x^3", v), parse("3*x^2", v),
                                  parse("6*x", v)}, 1, sp)) ||
            !zero_rows(spencer_D({parse("x/(1+x)", v), parse("1/(1+x)^2", v),
                                  parse("-2/(1+x)^3", v)}, 1, sp))) {
            r.detail = "comparison operator nonzero on a holonomic family";
            return r;
        }
    }
    {
        // components follow fiber_coordinates(2): derivative multi-indices
        // are ordered with the last base variable varying first
        JetSpec sp({"x", "y"}, {"u"});
        Vocabulary v = sp.vocab(0);
        auto rows = spencer_D({parse("x^2*y", v), parse("x^2", v),
                               parse("2*x*y", v), Expr(), parse("2*x", v),
                               parse("2*y", v)}, 1, sp);
        for (const auto& row : rows)
            for (const auto& e : row)
                if (!e.is_zero()) {
                    r.detail = "comparison operator nonzero on a holonomic family";
                    return r;
                }
    }

    // Restriction commutes with the comparison operator on random families.
    Prng rng(seed);
    int checked = 0;
    {
        JetSpec sp({"x"}, {"u"});
        std::vector<SymbolId> xu = {sp.x(0), sp.u(0)};
        for (int trial = 0; trial < 5; ++trial) {
            VectorField vf(sp, {autotest_detail::random_poly2(rng, xu)},
                           {autotest_detail::random_poly2(rng, xu)});
            std::vector<Expr> fam;
            for (int i = 0; i < 4; ++i)
                fam.push_back(autotest_detail::random_poly2(rng, {sp.x(0)}));
            if (!lambda_D_commutation_check(vf, fam, 2)) {
                r.detail = "commutation check failed on a random 1d family";
                return r;
            }
            ++checked;
        }
    }
    {
        JetSpec sp({"x", "y"}, {"u"});
        std::vector<SymbolId> xyu = {sp.x(0), sp.x(1), sp.u(0)};
        std::vector<SymbolId> xy = {sp.x(0), sp.x(1)};
        for (int trial = 0; trial < 5; ++trial) {
            VectorField vf(sp,
                           {autotest_detail::random_poly2(rng, xyu),
                            autotest_detail::random_poly2(rng, xyu)},
                           {autotest_detail::random_poly2(rng, xyu)});
            std::vector<Expr> fam;
            for (int i = 0; i < 6; ++i)
                fam.push_back(autotest_detail::random_poly2(rng, xy));
            if (!lambda_D_commutation_check(vf, fam, 1)) {
                r.detail = "commutation check failed on a random 2d family";
                return r;
            }
            ++checked;
        }
    }

    r.passed = true;
    r.detail = "coboundary, rank-nullity, holonomic vanishing, " +
               std::to_string(checked) + " random commutation cases";
    return r;
}

// Run the full suite. Sub-seeds are fixed offsets from the base seed so a
// fixed seed fixes every sampled input in every check.
inline std::vector<CheckResult> run_autotest(std::uint64_t seed) {
    using Runner = CheckResult (*)(std::uint64_t);
    auto guard = [](const std::string& name, auto fn) {
        try {
            return fn();
        } catch (const std::exception& e) {
            return CheckResult{name, false, std::string("exception: ") + e.what()};
        }
    };
    std::vector<CheckResult> out;
    out.push_back(guard("classical-prolongation-coefficients",
                        [&] { return check_classical_prolongation(); }));
    std::vector<std::pair<std::string, Runner>> sampled = {
        {"flow-consistency", &check_flow_consistency},
        {"bracket-morphism", &check_bracket_morphism},
        {"isometry-solution-dimensions", &check_isometry_dimensions},
        {"symbol-prolongation-identity", &check_symbol_prolongation},
        {"system-prolongation-row-spaces", &check_system_prolongation},
        {"pullback-covariance", &check_pullback_covariance},
        {"orbit-codimension-profile", &check_orbit_codimensions},
        {"curve-invariant-suite", &check_invariant_suite},
        {"invariant-span-finiteness", &check_invariant_finiteness},
        {"symbol-complex-identities", &check_symbol_complex},
    };
    std::uint64_t off = 1;
    for (const auto& [name, fn] : sampled) {
        std::uint64_t sub = seed + 0x9e3779b97f4a7c15ULL * off++;
        out.push_back(guard(name, [&] { return fn(sub); }));
    }
    return out;
}

}  // namespace jetforge

#endif
