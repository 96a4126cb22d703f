// jetforge: exact calculus on jet spaces from the command line.
//
// Every command reads a problem file, runs one analysis, and writes a
// deterministic report to standard output, either as JSON or as a flat text
// rendering of the same object. Exit codes: 0 success, 2 input or schema
// error, 3 mathematical domain error, 4 failed property check.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <jetforge/autotest.hpp>
#include <jetforge/problem.hpp>
#include <jetforge/report.hpp>

namespace {

using namespace jetforge;

struct CommonFlags {
    std::string path;
    std::string format = "json";
    bool strict = false;
    std::int64_t order = -1;
    std::int64_t samples = -1;
    std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("problem", f.path, "problem file (JSON)")->required();
    cmd->add_option("--format", f.format, "report format")
        ->check(CLI::IsMember({"json", "text"}));
    cmd->add_flag("--strict", f.strict,
                  "exit with code 4 when a checked property fails");
    cmd->add_option("--seed", f.seed, "override the problem seed");
    cmd->add_option("--samples", f.samples, "override the problem sample count");
}

std::uint64_t pick_seed(const CommonFlags& f, const ProblemSpec& p) {
    return f.seed >= 0 ? static_cast<std::uint64_t>(f.seed) : p.seed;
}

std::size_t pick_samples(const CommonFlags& f, const ProblemSpec& p) {
    return f.samples > 0 ? static_cast<std::size_t>(f.samples) : p.samples;
}

std::uint32_t pick_order(std::int64_t flag, std::uint32_t fallback) {
    return flag >= 0 ? static_cast<std::uint32_t>(flag) : fallback;
}

int g_rc = 0;

void emit(const Json& env, const CommonFlags& f, bool pass_property = true) {
    std::cout << render_report(env, f.format);
    if (f.strict && !pass_property) g_rc = 4;
}

// Largest jet order appearing in an expression, for inferring the natural
// order of user-supplied invariants and derivation coefficients.
std::uint32_t expr_jet_order(const Expr& e, const JetSpec& spec) {
    std::uint32_t k = 0;
    for (SymbolId s : e.symbols())
        if (auto c = spec.classify(s)) k = std::max(k, c->second.order());
    return k;
}

std::string sym_name(SymbolId s) { return SymbolTable::instance().info(s).name; }

// Finite generators as prolongable vector fields: section-mode rows act on
// the section chart, structure-mode rows act on the tensor bundle chart.
std::vector<VectorField> finite_fields(const ProblemSpec& p) {
    if (p.algebra_type != "finite_basis")
        throw InputError("this command needs a finite generator basis");
    if (p.mode == "sections") return p.section_generators();
    std::vector<VectorField> lifts;
    for (const auto& g : p.base_generators())
        lifts.push_back(tensor_lift(g, p.structure->type));
    return lifts;
}

std::vector<Expr> parse_list(const std::string& text, const Vocabulary& v) {
    std::vector<Expr> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse(item, v));
    if (out.empty()) throw InputError("empty expression list");
    return out;
}

// --- prolong ---------------------------------------------------------------

void cmd_prolong(const CommonFlags& f) {
    ProblemSpec p = load_problem(f.path);
    std::uint32_t k = pick_order(f.order, p.max_order);
    std::vector<VectorField> gens = finite_fields(p);
    const JetSpec& spec = gens[0].spec;

    Json result;
    result["order"] = k;
    result["generators"] = Json::array();
    for (const auto& g : gens) {
        ProlongedField pr(g, k);
        Json entry;
        Json xi;
        for (std::size_t i = 0; i < spec.base_dim(); ++i)
            xi[sym_name(spec.x(i))] = print_expr(pr.xi(i));
        entry["xi"] = xi;
        Json coeffs;
        for (SymbolId s : spec.fiber_coordinates(k)) {
            auto c = spec.classify(s);
            coeffs[sym_name(s)] = print_expr(pr.coeff(c->first, c->second));
        }
        entry["coefficients"] = coeffs;
        result["generators"].push_back(entry);
    }
    Json env = report_envelope("prolong", &p);
    env["result"] = result;
    emit(env, f);
}

// --- flowcheck ---------------------------------------------------------------

void cmd_flowcheck(const CommonFlags& f, double step, double tolerance) {
    ProblemSpec p = load_problem(f.path);
    std::uint32_t k = pick_order(f.order, std::min<std::uint32_t>(p.max_order, 3));
    std::size_t samples = pick_samples(f, p);
    Prng rng(pick_seed(f, p));
    std::vector<VectorField> gens = finite_fields(p);
    const JetSpec& spec = gens[0].spec;
    std::size_t n = spec.base_dim(), m = spec.fiber_dim();

    std::vector<SymbolId> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(spec.x(i));

    bool all = true;
    Json runs = Json::array();
    for (std::size_t gi = 0; gi < gens.size(); ++gi) {
        for (std::size_t s = 0; s < samples; ++s) {
            // structure mode flows the structure's own section; section mode
            // flows random tame polynomial sections
            std::vector<Expr> section;
            if (p.mode == "structure") {
                section = p.structure->comps;
            } else {
                for (std::size_t mu = 0; mu < m; ++mu)
                    section.push_back(autotest_detail::random_poly2(rng, xs, 1, 2));
            }
            std::vector<Rational> x0;
            for (std::size_t i = 0; i < n; ++i)
                x0.push_back(rng.small_rational(1, 2));
            FlowCheckReport rep =
                flow_check(gens[gi], section, x0, k, step, tolerance);
            Json row = flow_report_json(rep);
            row["generator"] = gi;
            runs.push_back(row);
            all = all && rep.passed;
        }
    }
    Json env = report_envelope("flowcheck", &p);
    env["result"]["order"] = k;
    env["result"]["runs"] = runs;
    env["result"]["passed"] = all;
    emit(env, f, all);
}

// --- lie-eq ------------------------------------------------------------------

void cmd_lie_eq(const CommonFlags& f) {
    ProblemSpec p = load_problem(f.path);
    if (!p.structure) throw InputError("lie-eq needs a structure-mode problem");
    std::uint32_t q = pick_order(f.order, p.lie_order);
    std::size_t samples = pick_samples(f, p);
    Prng rng(pick_seed(f, p));
    LinearJetSystem sys = lie_equation(*p.structure, q);

    Json dims = Json::array();
    Json iso = Json::array();
    std::size_t generic = 0;
    bool constant = true;
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<Rational> pt;
        for (std::size_t i = 0; i < sys.vfspec.base_dim(); ++i)
            pt.push_back(rng.small_rational());
        std::size_t d;
        try {
            Point at = bind_base(sys.vfspec, pt);
            d = sys.solution_dim(at);
            iso.push_back(isotropy_fiber(sys, at).size());
        } catch (const DivisionByZero&) {
            --s;  // structure has a pole here; redraw
            continue;
        }
        dims.push_back(d);
        if (s == 0) generic = d;
        constant = constant && d == generic;
        generic = std::max(generic, d);
    }
    Json env = report_envelope("lie-eq", &p);
    env["result"]["order"] = q;
    env["result"]["equations"] = sys.equations.size();
    env["result"]["unknowns"] = sys.unknowns().size();
    env["result"]["solution_dims"] = dims;
    env["result"]["solution_dim"] = generic;
    env["result"]["constant_dim"] = constant;
    env["result"]["isotropy_dims"] = iso;
    emit(env, f);
}

// --- symbol ------------------------------------------------------------------

void cmd_symbol(const CommonFlags& f) {
    ProblemSpec p = load_problem(f.path);
    if (!p.structure) throw InputError("symbol needs a structure-mode problem");
    std::uint32_t q = pick_order(f.order, p.lie_order);
    Prng rng(pick_seed(f, p));
    LinearJetSystem sys = lie_equation(*p.structure, q);
    std::vector<Rational> pt;
    for (std::size_t i = 0; i < sys.vfspec.base_dim(); ++i)
        pt.push_back(rng.small_rational());
    SymbolSpace g = symbol_of(sys, bind_base(sys.vfspec, pt));

    // dimension trail of the algebraic prolongations, at least one step
    std::uint32_t horizon = std::max<std::uint32_t>(p.max_order, q + 1);
    Json trail = Json::array();
    trail.push_back(g.dim());
    SymbolSpace cur = g;
    bool finite_type = g.dim() == 0;
    for (std::uint32_t h = q + 1; h <= horizon; ++h) {
        cur = algebraic_prolong(cur);
        trail.push_back(cur.dim());
        finite_type = finite_type || cur.dim() == 0;
    }
    Json env = report_envelope("symbol", &p);
    env["result"]["order"] = q;
    env["result"]["ambient"] = g.ambient_dim();
    env["result"]["dims"] = trail;
    env["result"]["finite_type"] = finite_type;
    emit(env, f);
}

// --- characters --------------------------------------------------------------

void cmd_characters(const CommonFlags& f) {
    ProblemSpec p = load_problem(f.path);
    if (!p.structure) throw InputError("characters needs a structure-mode problem");
    std::uint32_t q = pick_order(f.order, p.lie_order);
    Prng rng(pick_seed(f, p));
    LinearJetSystem sys = lie_equation(*p.structure, q);
    std::vector<Rational> pt;
    for (std::size_t i = 0; i < sys.vfspec.base_dim(); ++i)
        pt.push_back(rng.small_rational());
    SymbolSpace g = symbol_of(sys, bind_base(sys.vfspec, pt));
    CartanReport rep = cartan_characters(g, pick_seed(f, p) + 1);

    Json env = report_envelope("characters", &p);
    env["result"] = cartan_report_json(rep);
    env["result"]["order"] = q;
    env["result"]["symbol_dim"] = g.dim();
    emit(env, f);
}

// --- orbits ------------------------------------------------------------------

void cmd_orbits(const CommonFlags& f) {
    ProblemSpec p = load_problem(f.path);
    std::uint32_t kmax = pick_order(f.order, p.max_order);
    std::size_t samples = pick_samples(f, p);
    std::uint64_t seed = pick_seed(f, p);
    auto make = [&](std::uint32_t k) { return p.distribution(k); };

    Json env = report_envelope("orbits", &p);
    try {
        env["result"]["ranks"] = rank_report_json(rank_table(make, kmax, samples, seed));
        if (kmax >= 1)
            env["result"]["filtration"] =
                filtration_report_json(kernel_filtration(make, kmax, samples, seed + 1));
        if (p.algebra_type == "finite_basis") {
            auto trans = p.mode == "sections"
                             ? transitivity_check(p.section_generators(), samples, seed + 2)
                             : transitivity_check(p.base_generators(), samples, seed + 2);
            env["result"]["transitivity"] = transitivity_report_json(trans);
        } else {
            env["result"]["transitivity"] = transitivity_report_json(
                transitivity_check(lie_equation(*p.structure, p.lie_order),
                                   p.lie_order, samples, seed + 2));
        }
    } catch (const BracketClosureViolation& e) {
        std::cerr << "warning: generators are not bracket-closed\n";
        throw;
    }
    emit(env, f);
}

// --- invariants --------------------------------------------------------------

void cmd_inv_verify(const CommonFlags& f, const std::string& expr_text) {
    ProblemSpec p = load_problem(f.path);
    JetSpec spec = p.effective_spec();
    std::uint32_t vk = pick_order(f.order, p.max_order);
    Expr e = parse(expr_text, spec.vocab(vk));
    InvariantCandidate cand{expr_jet_order(e, spec), e};

    bool verified;
    std::string method;
    if (p.algebra_type == "finite_basis") {
        method = "symbolic";
        verified = verify_invariant(cand, finite_fields(p));
    } else {
        method = "pointwise";
        std::uint32_t fk = std::max(vk, cand.order);
        verified = verify_invariant(cand, p.distribution(fk), pick_samples(f, p),
                                    pick_seed(f, p));
    }
    Json env = report_envelope("invariants verify", &p);
    env["result"]["expr"] = print_expr(e);
    env["result"]["order"] = cand.order;
    env["result"]["method"] = method;
    env["result"]["verified"] = verified;
    emit(env, f, verified);
}

void cmd_inv_search(const CommonFlags& f, std::int64_t degree,
                    const std::string& den_text) {
    ProblemSpec p = load_problem(f.path);
    if (degree < 1) throw InputError("--degree must be at least 1");
    std::uint32_t k = pick_order(f.order, p.max_order);
    JetSpec spec = p.effective_spec();
    Expr den = parse(den_text, spec.vocab(k));
    auto basis = search_invariants(finite_fields(p), k,
                                   static_cast<std::uint32_t>(degree), den,
                                   pick_seed(f, p));
    Json env = report_envelope("invariants search", &p);
    env["result"]["order"] = k;
    env["result"]["degree"] = degree;
    env["result"]["denominator"] = print_expr(den);
    env["result"]["count"] = basis.size();
    Json rows = Json::array();
    for (const auto& c : basis) rows.push_back(print_expr(c.expr));
    env["result"]["basis"] = rows;
    emit(env, f);
}

void cmd_inv_derive(const CommonFlags& f, const std::string& expr_text,
                    const std::string& der_text) {
    ProblemSpec p = load_problem(f.path);
    JetSpec spec = p.effective_spec();
    std::uint32_t vk = pick_order(f.order, p.max_order);
    Vocabulary v = spec.vocab(vk);
    Expr e = parse(expr_text, v);
    InvariantCandidate cand{expr_jet_order(e, spec), e};

    std::vector<Expr> coeffs = parse_list(der_text, v);
    std::uint32_t ck = 0;
    for (const auto& c : coeffs) ck = std::max(ck, expr_jet_order(c, spec));
    FormalDerivation der{coeffs, ck};

    InvariantCandidate out = formal_derive(der, cand, spec);
    Json env = report_envelope("invariants derive", &p);
    env["result"]["expr"] = print_expr(e);
    Json cj = Json::array();
    for (const auto& c : coeffs) cj.push_back(print_expr(c));
    env["result"]["derivation"] = cj;
    env["result"]["result"] = print_expr(out.expr);
    env["result"]["result_order"] = out.order;
    bool ok = true;
    if (p.algebra_type == "finite_basis") {
        auto gens = finite_fields(p);
        bool adm = admissibility_test(der, gens);
        bool ver = verify_invariant(cand, gens);
        bool res = verify_invariant(out, gens);
        env["result"]["admissible"] = adm;
        env["result"]["input_verified"] = ver;
        env["result"]["result_verified"] = res;
        ok = !adm || !ver || res;  // admissible derivations preserve invariance
    }
    emit(env, f, ok);
}

void cmd_inv_finiteness(const CommonFlags& f, const std::vector<std::string>& exprs,
                        const std::vector<std::string>& ders) {
    ProblemSpec p = load_problem(f.path);
    JetSpec spec = p.effective_spec();
    std::uint32_t k = pick_order(f.order, p.max_order);
    Vocabulary v = spec.vocab(k);

    std::vector<InvariantCandidate> invs;
    for (const auto& t : exprs) {
        Expr e = parse(t, v);
        invs.push_back(InvariantCandidate{expr_jet_order(e, spec), e});
    }
    std::vector<FormalDerivation> dlist;
    for (const auto& t : ders) {
        std::vector<Expr> coeffs = parse_list(t, v);
        std::uint32_t ck = 0;
        for (const auto& c : coeffs) ck = std::max(ck, expr_jet_order(c, spec));
        dlist.push_back(FormalDerivation{coeffs, ck});
    }
    FinitenessReport rep = finiteness_span_check(invs, dlist, p.distribution(k),
                                                 pick_samples(f, p), pick_seed(f, p));
    Json env = report_envelope("invariants finiteness", &p);
    env["result"] = finiteness_report_json(rep);
    emit(env, f, rep.pass);
}

// --- act ---------------------------------------------------------------------

void cmd_act(const CommonFlags& f) {
    ProblemSpec p = load_problem(f.path);
    if (!p.structure) throw InputError("act needs a structure-mode problem");
    const StructureField& S = *p.structure;
    std::uint32_t k = pick_order(f.order, std::min<std::uint32_t>(p.max_order, 2));
    std::size_t samples = pick_samples(f, p);
    Prng rng(pick_seed(f, p));
    std::size_t n = S.base.size();

    // a private fiber name keeps the map chart clear of the problem's names
    std::vector<std::string> fiber;
    for (std::size_t i = 0; i < n; ++i)
        fiber.push_back("mapcomp" + std::to_string(i + 1));
    JetSpec ms(S.base, fiber);
    std::vector<SymbolId> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(ms.x(i));

    auto random_map_jet = [&](const std::vector<Rational>& at) {
        while (true) {
            std::vector<Expr> comps;
            for (std::size_t i = 0; i < n; ++i) {
                Expr c = Expr::sym(xs[i]);  // near-identity linear part
                for (std::size_t j = 0; j < n; ++j)
                    c = c + Expr::from_rational(rng.small_rational(1, 3)) *
                                Expr::sym(xs[j]);
                c = c + autotest_detail::random_poly2(rng, xs, 1, 3) *
                            Expr::sym(xs[i]) * Expr::sym(xs[i]);
                comps.push_back(c);
            }
            PolyJet jet = jet_of_section(comps, at, k + 1, ms);
            try {
                polyjet_invert(jet);
                return jet;
            } catch (const SingularLinearPart&) {
            }
        }
    };
    auto draw_point = [&] {
        std::vector<Rational> pt;
        for (std::size_t i = 0; i < n; ++i) pt.push_back(rng.small_rational(2, 2));
        return pt;
    };

    Json rows = Json::array();
    auto push_row = [&](const PolyJet& Z) {
        Json row;
        Json src = Json::array(), dst = Json::array();
        for (const auto& c : Z.source) src.push_back(c.get_str());
        for (const auto& c : Z.target) dst.push_back(c.get_str());
        row["source"] = src;
        row["target"] = dst;
        row["automorphism"] = automorphism_test(Z, S, k);
        PolyJet pb = phi_S(Z, S, k);
        Json coords = Json::array();
        JetSpec bundle(S.base, tensor_component_names(S.type, n));
        for (const auto& c : section_jet_coordinates(pb, bundle, k))
            coords.push_back(c.get_str());
        row["pullback"] = coords;
        return row;
    };

    // the identity jet is always an automorphism and anchors the table
    rows.push_back(push_row(PolyJet::identity(draw_point(), k + 1)));
    for (std::size_t s = 0; s < samples; ++s)
        rows.push_back(push_row(random_map_jet(draw_point())));

    // composition covariance on freshly drawn composable pairs
    bool cov = true;
    for (int c = 0; c < 5; ++c) {
        PolyJet Y = random_map_jet(draw_point());
        PolyJet X = random_map_jet(Y.target);
        PolyJet lhs = phi_S(polyjet_compose(X, Y), S, k);
        PolyJet rhs = tensor_transport(polyjet_invert(Y), phi_S(X, S, k), S.type);
        cov = cov && jets_identical(lhs, rhs);
    }

    Json env = report_envelope("act", &p);
    env["result"]["order"] = k;
    env["result"]["jets"] = rows;
    env["result"]["covariance_ok"] = cov;
    emit(env, f, cov);
}

// --- autotest ----------------------------------------------------------------

void cmd_autotest(const CommonFlags& f) {
    std::uint64_t seed = f.seed >= 0 ? static_cast<std::uint64_t>(f.seed) : 7;
    auto results = run_autotest(seed);
    bool all = true;
    Json checks = Json::array();
    for (const auto& r : results) {
        Json row;
        row["name"] = r.name;
        row["passed"] = r.passed;
        row["detail"] = r.detail;
        checks.push_back(row);
        all = all && r.passed;
    }
    Json env = report_envelope("autotest", nullptr);
    env["seed"] = seed;
    env["result"]["checks"] = checks;
    env["result"]["passed"] = all;
    std::cout << render_report(env, f.format);
    if (!all) g_rc = 4;  // the suite is a property check in itself
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact jet-space calculus: prolongation, automorphism "
                 "equations, symbols, orbits, and differential invariants"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonFlags prolong_f, flow_f, lieeq_f, symbol_f, chars_f, orbits_f;
    CommonFlags verify_f, search_f, derive_f, finite_f, act_f, auto_f;

    auto* c_prolong = app.add_subcommand("prolong", "prolong the finite generators");
    add_common(c_prolong, prolong_f);
    c_prolong->add_option("--order", prolong_f.order, "jet order");
    c_prolong->callback([&] { cmd_prolong(prolong_f); });

    double flow_step = 1.0 / 256, flow_tol = 1e-5;
    auto* c_flow = app.add_subcommand(
        "flowcheck", "compare prolongation coefficients with numeric flows");
    add_common(c_flow, flow_f);
    c_flow->add_option("--order", flow_f.order, "jet order");
    c_flow->add_option("--step", flow_step, "differentiation step");
    c_flow->add_option("--tolerance", flow_tol, "acceptance tolerance");
    c_flow->callback([&] { cmd_flowcheck(flow_f, flow_step, flow_tol); });

    auto* c_lieeq = app.add_subcommand(
        "lie-eq", "automorphism equation of the structure field");
    add_common(c_lieeq, lieeq_f);
    c_lieeq->add_option("--order", lieeq_f.order, "equation order");
    c_lieeq->callback([&] { cmd_lie_eq(lieeq_f); });

    auto* c_symbol = app.add_subcommand(
        "symbol", "symbol of the automorphism equation and its prolongations");
    add_common(c_symbol, symbol_f);
    c_symbol->add_option("--order", symbol_f.order, "equation order");
    c_symbol->callback([&] { cmd_symbol(symbol_f); });

    auto* c_chars = app.add_subcommand(
        "characters", "generic flag dimensions and involutivity of the symbol");
    add_common(c_chars, chars_f);
    c_chars->add_option("--order", chars_f.order, "equation order");
    c_chars->callback([&] { cmd_characters(chars_f); });

    auto* c_orbits = app.add_subcommand(
        "orbits", "orbit rank table, kernel filtration, and transitivity");
    add_common(c_orbits, orbits_f);
    c_orbits->add_option("--max-order", orbits_f.order, "largest jet order");
    c_orbits->callback([&] { cmd_orbits(orbits_f); });

    auto* c_inv = app.add_subcommand("invariants", "differential invariants");
    c_inv->require_subcommand(1);

    std::string verify_expr;
    auto* c_verify = c_inv->add_subcommand("verify", "check one invariant");
    add_common(c_verify, verify_f);
    c_verify->add_option("--order", verify_f.order, "jet order");
    c_verify->add_option("--expr", verify_expr, "candidate expression")->required();
    c_verify->callback([&] { cmd_inv_verify(verify_f, verify_expr); });

    std::int64_t search_degree = 2;
    std::string search_den = "1";
    auto* c_search = c_inv->add_subcommand(
        "search", "rational invariants with a prescribed denominator");
    add_common(c_search, search_f);
    c_search->add_option("--order", search_f.order, "jet order");
    c_search->add_option("--degree", search_degree, "numerator degree bound");
    c_search->add_option("--denominator", search_den, "denominator expression");
    c_search->callback([&] { cmd_inv_search(search_f, search_degree, search_den); });

    std::string derive_expr, derive_der;
    auto* c_derive = c_inv->add_subcommand(
        "derive", "apply a formal total-derivative combination");
    add_common(c_derive, derive_f);
    c_derive->add_option("--order", derive_f.order, "jet order");
    c_derive->add_option("--expr", derive_expr, "invariant to derive")->required();
    c_derive->add_option("--der", derive_der,
                         "derivation coefficients, comma separated")->required();
    c_derive->callback([&] { cmd_inv_derive(derive_f, derive_expr, derive_der); });

    std::vector<std::string> finite_exprs, finite_ders;
    auto* c_finite = c_inv->add_subcommand(
        "finiteness", "do the invariants and derivations span the orbit codimension");
    add_common(c_finite, finite_f);
    c_finite->add_option("--order", finite_f.order, "distribution order");
    c_finite->add_option("--expr", finite_exprs, "invariant (repeatable)");
    c_finite->add_option("--der", finite_ders,
                         "derivation coefficient list (repeatable)");
    c_finite->callback([&] { cmd_inv_finiteness(finite_f, finite_exprs, finite_ders); });

    auto* c_act = app.add_subcommand(
        "act", "pull the structure jet back along sampled map jets");
    add_common(c_act, act_f);
    c_act->add_option("--order", act_f.order, "structure jet order");
    c_act->callback([&] { cmd_act(act_f); });

    auto* c_auto = app.add_subcommand("autotest", "run the built-in check suite");
    c_auto->add_option("--seed", auto_f.seed, "suite seed");
    c_auto->add_option("--format", auto_f.format, "report format")
        ->check(CLI::IsMember({"json", "text"}));
    c_auto->callback([&] { cmd_autotest(auto_f); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return g_rc;
}
