#ifndef JETFORGE_INVARIANTS_HPP
#define JETFORGE_INVARIANTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jetforge/orbits.hpp"

namespace jetforge {

// A function on the order-k jet space, proposed as a first integral of the
// orbit distribution.
struct InvariantCandidate {
    std::uint32_t order = 0;
    Expr expr;
};

// Derivation of the form sum_i c^i D_i with coefficients on jet coordinates
// of order at most `order`.
struct FormalDerivation {
    std::vector<Expr> coeffs;
    std::uint32_t order = 0;
};

namespace detail {

inline void check_expr_order(const Expr& e, const JetSpec& spec, std::uint32_t k,
                             const std::string& what) {
    for (SymbolId s : e.symbols()) {
        const SymbolInfo& info = SymbolTable::instance().info(s);
        if (info.kind == SymbolKind::Param) continue;
        if (spec.base_index(s)) continue;
        auto c = spec.classify(s);
        if (!c) throw InputError(what + " uses '" + info.name +
                                 "', which is not a chart coordinate");
        if (c->second.order() > k)
            throw OrderMismatch(what + " uses '" + info.name +
                                "' above its stated order");
    }
}

inline void check_derivation(const FormalDerivation& c, const JetSpec& spec) {
    if (c.coeffs.size() != spec.base_dim())
        throw SchemaError("derivation needs one coefficient per base direction");
    bool nonzero = false;
    for (const auto& e : c.coeffs) {
        check_expr_order(e, spec, c.order, "derivation coefficient");
        if (!e.is_zero()) nonzero = true;
    }
    if (!nonzero) throw SchemaError("derivation is identically zero");
}

// Rank and kernel arguments only see a gradient row up to a nonzero scale,
// so a guarded function F is replaced by F^2: the square of a half-integer
// guard power is rational, and d(F^2) = 2F dF spans the same line wherever
// F does not vanish (enforced at each sample).
struct RationalSurrogate {
    Expr fn;
    bool need_nonzero = false;
};

inline RationalSurrogate rational_surrogate(const Expr& f) {
    if (!f.has_guard()) return {f, false};
    Expr sq = f * f;
    if (sq.has_guard())
        throw DomainError("only square-root guards admit a rational surrogate");
    return {sq, true};
}

} // namespace detail

// Exact verification for a finite generator set: each prolonged generator,
// applied as a derivation, must annihilate the candidate identically.
inline bool verify_invariant(const InvariantCandidate& f,
                             const std::vector<VectorField>& gens) {
    if (gens.empty()) throw SchemaError("verification needs at least one generator");
    detail::check_expr_order(f.expr, gens[0].spec, f.order, "candidate");
    for (const auto& g : gens)
        if (!ProlongedField(g, f.order).apply(f.expr).is_zero()) return false;
    return true;
}

// Pointwise verification against any orbit distribution: the differential of
// the candidate must kill every distribution row at each sampled jet.
inline bool verify_invariant(const InvariantCandidate& f, const DistributionFrame& frame,
                             std::size_t samples, std::uint64_t seed) {
    if (samples < 1) throw SchemaError("pointwise verification needs samples");
    if (frame.order < f.order)
        throw OrderMismatch("distribution order below the candidate order");
    detail::check_expr_order(f.expr, frame.espec, f.order, "candidate");
    detail::RationalSurrogate s = detail::rational_surrogate(f.expr);
    std::vector<SymbolId> coords = frame.espec.coordinates(frame.order);
    std::vector<Expr> grad;
    for (SymbolId v : coords) grad.push_back(diff(s.fn, v));

    Prng rng(seed);
    for (std::size_t t = 0; t < samples; ++t) {
        std::size_t attempts = 0;
        while (true) {
            if (++attempts > 32) throw AllSamplesSingular();
            Point at = random_jet_point(frame.espec, frame.order, rng);
            try {
                if (s.need_nonzero && eval_rational(s.fn, at) == 0) continue;
                MatQ m = frame.rows_at(at);
                VecQ g;
                for (const auto& e : grad) g.push_back(eval_rational(e, at));
                for (std::size_t r = 0; r < m.rows; ++r) {
                    Rational dot(0);
                    for (std::size_t c = 0; c < m.cols; ++c) dot += m.at(r, c) * g[c];
                    if (dot != 0) return false;
                }
                break;
            } catch (const DivisionByZero&) {
            } catch (const SingularLinearPart&) {
            }
        }
    }
    return true;
}

namespace detail {

// Exponent vectors of total degree <= d over nvars variables, constant
// first, then degree by degree in the fixed multi-index order.
inline std::vector<MultiIndex> monomials_up_to(std::size_t nvars, std::uint32_t d) {
    std::vector<MultiIndex> out;
    for (std::uint32_t h = 0; h <= d; ++h)
        for (const auto& j : multi_indices_of_order(nvars, h)) out.push_back(j);
    return out;
}

inline Expr monomial_expr(const std::vector<SymbolId>& vars, const MultiIndex& e) {
    Expr out = Expr::from_long(1);
    for (std::size_t v = 0; v < vars.size(); ++v)
        for (std::uint32_t r = 0; r < e[v]; ++r) out = out * Expr::sym(vars[v]);
    return out;
}

// Polynomial coefficient vector of q in the monomial basis, by Taylor
// extraction at the origin; nullopt when q does not lie in the span.
inline std::optional<VecQ> coeff_vector(const Expr& q, const std::vector<SymbolId>& vars,
                                        const std::vector<MultiIndex>& mons) {
    if (q.has_guard()) return std::nullopt;
    Point origin;
    for (SymbolId v : vars) origin[v] = Rational(0);
    VecQ out;
    Expr rebuilt;
    for (const auto& e : mons) {
        Expr de = q;
        for (std::size_t v = 0; v < vars.size(); ++v)
            for (std::uint32_t r = 0; r < e[v]; ++r) de = diff(de, vars[v]);
        Rational c;
        try {
            c = eval_rational(de, origin);
        } catch (const DivisionByZero&) {
            return std::nullopt;  // not a polynomial around the origin
        }
        c /= Rational(static_cast<unsigned long>(e.factorial()));
        out.push_back(c);
        if (c != 0)
            rebuilt = rebuilt + Expr::from_rational(c) * monomial_expr(vars, e);
    }
    if (!(rebuilt - q).is_zero()) return std::nullopt;  // degree too high
    return out;
}

// Reduce v against echelon rows in place; returns false when v reduces to 0.
inline bool echelon_reduce(VecQ& v, const std::vector<std::pair<std::size_t, VecQ>>& rows) {
    for (const auto& [piv, row] : rows) {
        if (v[piv] == 0) continue;
        Rational fac = v[piv] / row[piv];
        for (std::size_t c = 0; c < v.size(); ++c) v[c] -= fac * row[c];
    }
    for (std::size_t c = 0; c < v.size(); ++c)
        if (v[c] != 0) return true;
    return false;
}

inline std::size_t leading_index(const VecQ& v) {
    for (std::size_t c = 0; c < v.size(); ++c)
        if (v[c] != 0) return c;
    throw DomainError("zero vector has no leading index");
}

} // namespace detail

// Rational-ansatz invariant search: all f = P/denominator with deg P <= degree
// annihilated by every prolonged generator, as a basis modulo constants.
// Candidate coefficient vectors come from exact solves on sampled rows of the
// linear conditions; only vectors whose condition holds identically (checked
// symbolically) are returned, so an insufficient sample can only cost a
// retry, never produce a wrong answer. No solutions is a valid empty result.
inline std::vector<InvariantCandidate> search_invariants(
        const std::vector<VectorField>& gens, std::uint32_t k, std::uint32_t degree,
        const Expr& denominator, std::uint64_t seed = 29) {
    if (gens.empty()) throw SchemaError("search needs at least one generator");
    const JetSpec& spec = gens[0].spec;
    detail::check_expr_order(denominator, spec, k, "denominator");
    std::vector<SymbolId> vars = spec.coordinates(k);
    std::vector<MultiIndex> mons = detail::monomials_up_to(vars.size(), degree);

    std::vector<ProlongedField> prol;
    for (const auto& g : gens) prol.emplace_back(g, k);
    // generator coefficient per coordinate direction, for the derivation rule
    std::vector<std::vector<Expr>> dir(gens.size());
    for (std::size_t a = 0; a < gens.size(); ++a)
        for (SymbolId v : vars) {
            if (auto bi = spec.base_index(v)) {
                dir[a].push_back(prol[a].xi(*bi));
                continue;
            }
            auto c = spec.classify(v);
            dir[a].push_back(prol[a].coeff(c->first, c->second));
        }
    std::vector<Expr> prq;
    for (std::size_t a = 0; a < gens.size(); ++a) prq.push_back(prol[a].apply(denominator));

    // A generator whose prolongation is a constant coordinate derivation
    // c d/dv with pr(Q) = 0 forces exactly "P free of v": drop those
    // monomials and the generator. This is an equivalence, not a heuristic,
    // and it collapses translation-heavy ansatz spaces.
    {
        std::vector<bool> drop_var(vars.size(), false), drop_gen(gens.size(), false);
        for (std::size_t a = 0; a < gens.size(); ++a) {
            if (!prq[a].is_zero()) continue;
            std::size_t hits = 0, where = 0;
            bool constant = true;
            for (std::size_t v = 0; v < vars.size(); ++v) {
                if (dir[a][v].is_zero()) continue;
                ++hits;
                where = v;
                if (!dir[a][v].symbols().empty()) constant = false;
            }
            if (hits == 1 && constant) {
                drop_var[where] = true;
                drop_gen[a] = true;
            }
        }
        std::vector<MultiIndex> kept;
        for (const auto& e : mons) {
            bool ok = true;
            for (std::size_t v = 0; v < vars.size(); ++v)
                if (drop_var[v] && e[v] > 0) ok = false;
            if (ok) kept.push_back(e);
        }
        mons = std::move(kept);
        std::vector<ProlongedField> pk;
        std::vector<std::vector<Expr>> dk;
        std::vector<Expr> qk;
        for (std::size_t a = 0; a < gens.size(); ++a) {
            if (drop_gen[a]) continue;
            pk.push_back(prol[a]);
            dk.push_back(dir[a]);
            qk.push_back(prq[a]);
        }
        prol = std::move(pk);
        dir = std::move(dk);
        prq = std::move(qk);
    }

    auto emit_basis = [&](const std::vector<VecQ>& sols) {
        std::vector<std::pair<std::size_t, VecQ>> echelon;
        if (auto qvec = detail::coeff_vector(denominator, vars, mons))
            echelon.push_back({detail::leading_index(*qvec), *qvec});
        std::vector<InvariantCandidate> out;
        for (const VecQ& sol : sols) {
            VecQ v = sol;
            if (!detail::echelon_reduce(v, echelon)) continue;
            std::size_t piv = detail::leading_index(v);
            Rational lead = v[piv];
            for (auto& x : v) x /= lead;
            echelon.push_back({piv, v});
            Expr p;
            for (std::size_t m = 0; m < mons.size(); ++m)
                if (v[m] != 0)
                    p = p + Expr::from_rational(v[m]) * detail::monomial_expr(vars, mons[m]);
            out.push_back(InvariantCandidate{k, p / denominator});
        }
        return out;
    };

    if (prol.empty()) {
        // every remaining monomial already satisfies all conditions
        std::vector<VecQ> sols;
        for (std::size_t m = 0; m < mons.size(); ++m) {
            VecQ unit(mons.size(), Rational(0));
            unit[m] = Rational(1);
            sols.push_back(std::move(unit));
        }
        return emit_basis(sols);
    }

    Prng rng(seed);
    std::size_t points = mons.size() / prol.size() + 4;
    std::vector<VecQ> rows;
    for (std::size_t round = 0; round < 5; ++round) {
        while (rows.size() < (points * prol.size())) {
            std::size_t attempts = 0;
            while (true) {
                if (++attempts > 32) throw AllSamplesSingular();
                Point at = random_jet_point(spec, k, rng);
                try {
                    Rational qv = eval_rational(denominator, at);
                    if (qv == 0) continue;
                    std::vector<VecQ> pt_rows;
                    for (std::size_t a = 0; a < prol.size(); ++a) {
                        VecQ dv;
                        for (const auto& e : dir[a]) dv.push_back(eval_rational(e, at));
                        Rational pq = eval_rational(prq[a], at);
                        // value tables: var powers up to the ansatz degree
                        std::vector<std::vector<Rational>> pw(vars.size());
                        for (std::size_t v = 0; v < vars.size(); ++v) {
                            pw[v].push_back(Rational(1));
                            Rational x = at.at(vars[v]);
                            for (std::uint32_t r = 1; r <= degree; ++r)
                                pw[v].push_back(pw[v].back() * x);
                        }
                        VecQ row;
                        for (const auto& e : mons) {
                            Rational mval(1), dsum(0);
                            for (std::size_t v = 0; v < vars.size(); ++v)
                                mval *= pw[v][e[v]];
                            for (std::size_t v = 0; v < vars.size(); ++v) {
                                if (e[v] == 0) continue;
                                Rational dm = Rational(e[v]) * pw[v][e[v] - 1];
                                for (std::size_t w = 0; w < vars.size(); ++w)
                                    if (w != v) dm *= pw[w][e[w]];
                                dsum += dv[v] * dm;
                            }
                            row.push_back(qv * dsum - mval * pq);
                        }
                        pt_rows.push_back(std::move(row));
                    }
                    for (auto& r : pt_rows) rows.push_back(std::move(r));
                    break;
                } catch (const DivisionByZero&) {
                }
            }
        }
        std::vector<VecQ> sols = nullspace(MatQ::from_rows(rows));
        // symbolic acceptance of every candidate vector
        bool all_exact = true;
        for (const VecQ& c : sols) {
            Expr p;
            for (std::size_t m = 0; m < mons.size(); ++m)
                if (c[m] != 0)
                    p = p + Expr::from_rational(c[m]) * detail::monomial_expr(vars, mons[m]);
            for (std::size_t a = 0; a < prol.size() && all_exact; ++a)
                all_exact = (denominator * prol[a].apply(p) - p * prq[a]).is_zero();
            if (!all_exact) break;
        }
        if (!all_exact) {
            points *= 2;  // the sample missed a condition; add rows and retry
            continue;
        }
        return emit_basis(sols);
    }
    throw AllSamplesSingular();
}

// Exact commutator condition making the derivation map invariants to
// invariants: for every generator and every direction j,
//   p xi (c^j) == sum_i c^i D_i xi^j.
inline bool admissibility_test(const FormalDerivation& c,
                               const std::vector<VectorField>& gens) {
    if (gens.empty()) throw SchemaError("admissibility needs at least one generator");
    const JetSpec& spec = gens[0].spec;
    detail::check_derivation(c, spec);
    for (const auto& g : gens) {
        ProlongedField p(g, c.order);
        for (std::size_t j = 0; j < spec.base_dim(); ++j) {
            Expr lhs = p.apply(c.coeffs[j]);
            Expr rhs;
            for (std::size_t i = 0; i < spec.base_dim(); ++i)
                rhs = rhs + c.coeffs[i] * total_derivative(g.xi[j], i, spec);
            if (!(lhs - rhs).is_zero()) return false;
        }
    }
    return true;
}

// The derivation applied to a candidate: sum_i c^i D_i f, one order up.
inline InvariantCandidate formal_derive(const FormalDerivation& c,
                                        const InvariantCandidate& f,
                                        const JetSpec& spec) {
    detail::check_derivation(c, spec);
    detail::check_expr_order(f.expr, spec, f.order, "candidate");
    Expr out;
    for (std::size_t i = 0; i < spec.base_dim(); ++i)
        out = out + c.coeffs[i] * total_derivative(f.expr, i, spec);
    return InvariantCandidate{std::max(f.order + 1, c.order), out};
}

// Operator identity for the bracket of two formal derivations, checked on a
// given test function:
//   [d_a, d_b] f == sum_i (d_a b^i - d_b a^i) D_i f.
inline bool derivation_bracket_check(const FormalDerivation& a, const FormalDerivation& b,
                                     const Expr& test_fn, const JetSpec& spec) {
    detail::check_derivation(a, spec);
    detail::check_derivation(b, spec);
    auto apply = [&](const FormalDerivation& c, const Expr& e) {
        Expr out;
        for (std::size_t i = 0; i < spec.base_dim(); ++i)
            out = out + c.coeffs[i] * total_derivative(e, i, spec);
        return out;
    };
    Expr lhs = apply(a, apply(b, test_fn)) - apply(b, apply(a, test_fn));
    Expr rhs;
    for (std::size_t i = 0; i < spec.base_dim(); ++i)
        rhs = rhs + (apply(a, b.coeffs[i]) - apply(b, a.coeffs[i])) *
                        total_derivative(test_fn, i, spec);
    return (lhs - rhs).is_zero();
}

// ---- finiteness span check ----

struct FinitenessRow {
    std::size_t function_rank = 0;  // rank of the differentials at the sample
    std::size_t orbit_rank = 0;
    std::size_t codim = 0;          // ambient - orbit_rank
    bool annihilates = true;        // every differential kills the distribution
    bool pass = false;              // annihilates and function_rank == codim
};

struct FinitenessReport {
    std::uint32_t order = 0;
    std::size_t ambient = 0;
    std::vector<FinitenessRow> per_sample;
    bool pass = false;
};

// At samples of the order-(k+1) jet space: the differentials of the lifted
// invariants together with their derivations must cut out exactly the orbit
// distribution, i.e. annihilate it and reach the full orbit codimension.
inline FinitenessReport finiteness_span_check(const std::vector<InvariantCandidate>& invs,
                                              const std::vector<FormalDerivation>& ders,
                                              const DistributionFrame& frame,
                                              std::size_t samples, std::uint64_t seed) {
    if (samples < 1) throw SchemaError("span check needs at least one sample");
    std::vector<Expr> fns;
    for (const auto& f : invs) {
        if (f.order > frame.order)
            throw OrderMismatch("invariant order above the distribution order");
        detail::check_expr_order(f.expr, frame.espec, f.order, "invariant");
        fns.push_back(f.expr);
    }
    for (const auto& c : ders)
        for (const auto& f : invs) {
            InvariantCandidate g = formal_derive(c, f, frame.espec);
            if (g.order > frame.order)
                throw OrderMismatch("derived invariant order above the distribution order");
            fns.push_back(g.expr);
        }
    std::vector<detail::RationalSurrogate> surr;
    for (const auto& f : fns) surr.push_back(detail::rational_surrogate(f));
    std::vector<SymbolId> coords = frame.espec.coordinates(frame.order);
    std::vector<std::vector<Expr>> grads;
    for (const auto& s : surr) {
        std::vector<Expr> g;
        for (SymbolId v : coords) g.push_back(diff(s.fn, v));
        grads.push_back(std::move(g));
    }

    FinitenessReport rep{frame.order, coords.size(), {}, true};
    Prng rng(seed);
    for (std::size_t t = 0; t < samples; ++t) {
        std::size_t attempts = 0;
        while (true) {
            if (++attempts > 32) throw AllSamplesSingular();
            Point at = random_jet_point(frame.espec, frame.order, rng);
            try {
                bool degenerate = false;
                for (const auto& s : surr)
                    if (s.need_nonzero && eval_rational(s.fn, at) == 0) {
                        degenerate = true;
                        break;
                    }
                if (degenerate) continue;
                MatQ dist = frame.rows_at(at);
                MatQ g(grads.size(), coords.size());
                for (std::size_t r = 0; r < grads.size(); ++r)
                    for (std::size_t c = 0; c < coords.size(); ++c)
                        g.at(r, c) = eval_rational(grads[r][c], at);
                FinitenessRow row;
                row.orbit_rank = rank(dist);
                row.function_rank = rank(g);
                row.codim = coords.size() - row.orbit_rank;
                for (std::size_t r = 0; r < g.rows && row.annihilates; ++r)
                    for (std::size_t dr = 0; dr < dist.rows; ++dr) {
                        Rational dot(0);
                        for (std::size_t c = 0; c < g.cols; ++c)
                            dot += g.at(r, c) * dist.at(dr, c);
                        if (dot != 0) {
                            row.annihilates = false;
                            break;
                        }
                    }
                row.pass = row.annihilates && row.function_rank == row.codim;
                rep.pass = rep.pass && row.pass;
                rep.per_sample.push_back(row);
                break;
            } catch (const DivisionByZero&) {
            } catch (const SingularLinearPart&) {
            }
        }
    }
    return rep;
}

} // namespace jetforge

#endif
