#ifndef JETFORGE_ORBITS_HPP
#define JETFORGE_ORBITS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "jetforge/spencer.hpp"

namespace jetforge {

namespace detail {

inline MatQ transpose(const MatQ& m) {
    MatQ t(m.cols, m.rows);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) t.at(c, r) = m.at(r, c);
    return t;
}

inline std::vector<SymbolId> expr_vars(const std::vector<std::vector<Expr>>& vecs) {
    std::set<SymbolId> vars;
    for (const auto& vec : vecs)
        for (const auto& e : vec)
            for (SymbolId s : e.symbols())
                if (SymbolTable::instance().info(s).kind != SymbolKind::Param)
                    vars.insert(s);
    return {vars.begin(), vars.end()};
}

} // namespace detail

// Exact rational coefficients expressing the target vector of expressions as
// a combination of the basis vectors. Random evaluations propose candidate
// coefficients; the symbolic identity is what accepts them, so the result is
// exact. nullopt when no combination exists.
inline std::optional<VecQ> expr_combination(const std::vector<std::vector<Expr>>& basis,
                                            const std::vector<Expr>& target,
                                            Prng& rng) {
    if (basis.empty()) {
        for (const auto& e : target)
            if (!e.is_zero()) return std::nullopt;
        return VecQ{};
    }
    std::vector<std::vector<Expr>> all = basis;
    all.push_back(target);
    std::vector<SymbolId> vars = detail::expr_vars(all);
    std::size_t comps = target.size();
    std::size_t draws = basis.size() / std::max<std::size_t>(comps, 1) + 3;

    std::vector<VecQ> rows;
    VecQ rhs;
    for (std::size_t round = 0; round < 4; ++round) {
        for (std::size_t d = 0; d < draws; ++d) {
            std::size_t attempts = 0;
            while (true) {
                if (++attempts > 32) throw AllSamplesSingular();
                Point at;
                for (SymbolId s : vars) at[s] = rng.small_rational();
                try {
                    std::vector<VecQ> srows;
                    VecQ srhs;
                    for (std::size_t c = 0; c < comps; ++c) {
                        VecQ row;
                        for (const auto& b : basis) row.push_back(eval_rational(b[c], at));
                        srhs.push_back(eval_rational(target[c], at));
                        srows.push_back(std::move(row));
                    }
                    rows.insert(rows.end(), srows.begin(), srows.end());
                    rhs.insert(rhs.end(), srhs.begin(), srhs.end());
                    break;
                } catch (const DivisionByZero&) {
                }
            }
        }
        MatQ A = MatQ::from_rows(rows);
        auto sol = solve(A, rhs);
        if (!sol) return std::nullopt;  // a true combination would satisfy any sample
        std::vector<Expr> residual = target;
        for (std::size_t c = 0; c < comps; ++c)
            for (std::size_t a = 0; a < basis.size(); ++a)
                residual[c] = residual[c] - Expr::from_rational((*sol)[a]) * basis[a][c];
        bool exact = true;
        for (const auto& e : residual)
            if (!e.is_zero()) { exact = false; break; }
        if (exact) return sol;
        // accidental degeneracy of the sample: add more rows and retry
    }
    return std::nullopt;
}

inline std::vector<Expr> field_components(const VectorField& v) {
    std::vector<Expr> out = v.xi;
    out.insert(out.end(), v.phi.begin(), v.phi.end());
    return out;
}

// Structure constants of a finite generator set: c[i][j] expresses the
// bracket of generators i and j in the span. Throws when some bracket
// escapes the span, since that set does not generate a Lie pseudo-algebra.
inline std::vector<std::vector<VecQ>> structure_constants(
        const std::vector<VectorField>& gens, std::uint64_t seed = 17) {
    Prng rng(seed);
    std::vector<std::vector<Expr>> basis;
    for (const auto& g : gens) basis.push_back(field_components(g));
    std::vector<std::vector<VecQ>> c(gens.size(), std::vector<VecQ>(gens.size()));
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = 0; j < gens.size(); ++j) {
            if (i == j) {
                c[i][j].assign(gens.size(), Rational(0));
                continue;
            }
            auto coeffs = expr_combination(basis, field_components(bracket(gens[i], gens[j])), rng);
            if (!coeffs)
                throw BracketClosureViolation(
                    "bracket of generators " + std::to_string(i) + " and " +
                    std::to_string(j) + " is outside the generator span");
            c[i][j] = *coeffs;
        }
    return c;
}

// The order-k orbit distribution: tangent rows on the order-k jet space,
// either as closed-form expression rows (finite generator sets) or as a
// per-point evaluator (solution spaces of a linear system).
struct DistributionFrame {
    JetSpec espec;
    std::uint32_t order = 0;
    // one row per generator when the spanning set is finite; empty for
    // pointwise frames built from a linear system's solution fibers
    std::vector<std::vector<Expr>> frame_rows;
    std::function<MatQ(const Point&)> rows_at;

    std::size_t ambient_dim() const { return espec.coordinates(order).size(); }
};

namespace detail {

inline std::vector<Expr> prolonged_row(const ProlongedField& p) {
    const JetSpec& spec = p.spec();
    std::vector<Expr> row;
    for (std::size_t i = 0; i < spec.base_dim(); ++i) row.push_back(p.xi(i));
    for (SymbolId id : spec.fiber_coordinates(p.order())) {
        auto c = spec.classify(id);
        row.push_back(p.coeff(c->first, c->second));
    }
    return row;
}

inline MatQ eval_rows(const std::vector<std::vector<Expr>>& rows, const Point& at) {
    MatQ m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m.at(r, c) = eval_rational(rows[r][c], at);
    return m;
}

} // namespace detail

// Finite generator set acting on jets of sections of its own bundle.
inline DistributionFrame build_distribution(const std::vector<VectorField>& gens,
                                            std::uint32_t k, std::uint64_t seed = 17) {
    if (gens.empty()) throw SchemaError("a distribution needs at least one generator");
    structure_constants(gens, seed);  // closure proof
    DistributionFrame f{gens[0].spec, k, {}, {}};
    for (const auto& g : gens)
        f.frame_rows.push_back(detail::prolonged_row(ProlongedField(g, k)));
    auto rows = f.frame_rows;
    f.rows_at = [rows](const Point& at) { return detail::eval_rows(rows, at); };
    return f;
}

// Finite set of base fields acting on a tensor bundle through their lifts.
inline DistributionFrame build_distribution(const std::vector<BaseField>& gens,
                                            const TensorType& type, std::uint32_t k,
                                            std::uint64_t seed = 17) {
    std::vector<VectorField> lifts;
    for (const auto& g : gens) lifts.push_back(tensor_lift(g, type));
    return build_distribution(lifts, k, seed);
}

// Pointwise Taylor-polynomial representative of a solution jet: vals are
// derivative coordinates aligned with sys.unknowns(), based at y.
inline std::vector<Expr> taylor_components(const LinearJetSystem& sys, const VecQ& vals,
                                           const Point& y) {
    std::size_t n = sys.vfspec.base_dim();
    std::vector<Expr> comps(sys.field_dim());
    auto cols = sys.unknowns();
    for (std::size_t p = 0; p < cols.size(); ++p) {
        if (vals[p] == 0) continue;
        auto coord = sys.vfspec.classify(cols[p]);
        const MultiIndex& J = coord->second;
        Expr term = Expr::from_rational(
            vals[p] / Rational(static_cast<unsigned long>(J.factorial())));
        for (std::size_t i = 0; i < n; ++i) {
            Expr lin = Expr::sym(sys.vfspec.x(i)) -
                       Expr::from_rational(y.at(sys.vfspec.x(i)));
            for (std::uint32_t r = 0; r < J[i]; ++r) term = term * lin;
        }
        comps[coord->first] = comps[coord->first] + term;
    }
    return comps;
}

// Solution sheaf of a linear system acting on jets of sections by point
// transformations of the total space: the system's base variables name, in
// order, the base and then the fiber coordinates of the section bundle.
struct SectionAction {
    JetSpec espec;
};

// Solution sheaf of a linear system of base fields acting on a tensor bundle.
struct StructureAction {
    std::vector<std::string> base;
    TensorType type;
};

inline DistributionFrame build_distribution(const LinearJetSystem& sys,
                                            const SectionAction& act,
                                            std::uint32_t k) {
    std::size_t n = act.espec.base_dim(), m = act.espec.fiber_dim();
    if (sys.vfspec.base_dim() != n + m || sys.field_dim() != n + m)
        throw SchemaError("system unknowns do not match the total-space dimension");
    std::uint32_t need = k + 1;
    LinearJetSystem big = need > sys.order ? prolong_system(sys, need - sys.order) : sys;
    if (big.order != need) throw OrderMismatch("system order exceeds the jet order plus one");

    // system base variable i stands for this order-0 coordinate of the bundle
    std::vector<SymbolId> frame;
    for (std::size_t i = 0; i < n; ++i) frame.push_back(act.espec.x(i));
    for (std::size_t mu = 0; mu < m; ++mu) frame.push_back(act.espec.u(mu));
    Bindings rename;
    for (std::size_t i = 0; i < n + m; ++i)
        rename[big.vfspec.x(i)] = Expr::sym(frame[i]);

    JetSpec espec = act.espec;
    DistributionFrame f{espec, k, {}, {}};
    f.rows_at = [big, frame, rename, espec, k, n, m](const Point& at) {
        Point y;
        for (std::size_t i = 0; i < n + m; ++i) y[big.vfspec.x(i)] = at.at(frame[i]);
        std::vector<VecQ> rows;
        for (const VecQ& vals : big.kernel_basis(y)) {
            std::vector<Expr> comps = taylor_components(big, vals, y);
            for (auto& e : comps) e = subs(e, rename);
            VectorField vf(espec, {comps.begin(), comps.begin() + static_cast<long>(n)},
                           {comps.begin() + static_cast<long>(n), comps.end()});
            std::vector<Expr> row = detail::prolonged_row(ProlongedField(vf, k));
            VecQ vrow;
            for (const auto& e : row) vrow.push_back(eval_rational(e, at));
            rows.push_back(std::move(vrow));
        }
        if (rows.empty()) return MatQ(0, espec.coordinates(k).size());
        return MatQ::from_rows(rows);
    };
    return f;
}

inline DistributionFrame build_distribution(const LinearJetSystem& sys,
                                            const StructureAction& act,
                                            std::uint32_t k) {
    std::size_t n = act.base.size();
    if (sys.vfspec.base_dim() != n || sys.field_dim() != n)
        throw SchemaError("system unknowns do not match the base dimension");
    std::uint32_t need = k + 1;
    LinearJetSystem big = need > sys.order ? prolong_system(sys, need - sys.order) : sys;
    if (big.order != need) throw OrderMismatch("system order exceeds the jet order plus one");

    JetSpec espec(act.base, tensor_component_names(act.type, n));
    std::vector<std::string> base = act.base;
    TensorType type = act.type;
    DistributionFrame f{espec, k, {}, {}};
    f.rows_at = [big, espec, base, type, k, n](const Point& at) {
        Point y;
        for (std::size_t i = 0; i < n; ++i) y[big.vfspec.x(i)] = at.at(big.vfspec.x(i));
        std::vector<VecQ> rows;
        for (const VecQ& vals : big.kernel_basis(y)) {
            BaseField bf(base, taylor_components(big, vals, y));
            VectorField vf = tensor_lift(bf, type);
            std::vector<Expr> row = detail::prolonged_row(ProlongedField(vf, k));
            VecQ vrow;
            for (const auto& e : row) vrow.push_back(eval_rational(e, at));
            rows.push_back(std::move(vrow));
        }
        if (rows.empty()) return MatQ(0, espec.coordinates(k).size());
        return MatQ::from_rows(rows);
    };
    return f;
}

// ---- rank reports ----

struct RankRow {
    std::uint32_t order = 0;
    std::size_t ambient = 0;
    std::size_t rank = 0;   // maximum across samples = generic value
    std::size_t codim = 0;
    bool constant_rank = true;
    std::vector<std::size_t> sample_ranks;
};

struct RankReport {
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::vector<RankRow> rows;             // orders 0..kmax
    std::vector<std::size_t> kernel_dims;  // k=1..kmax: rank_k - rank_{k-1}
};

inline Point random_jet_point(const JetSpec& spec, std::uint32_t k, Prng& rng) {
    Point at;
    for (SymbolId s : spec.coordinates(k)) at[s] = rng.small_rational();
    return at;
}

inline RankRow generic_rank(const DistributionFrame& f, std::size_t samples,
                            std::uint64_t seed) {
    if (samples < 1) throw SchemaError("rank sampling needs at least one sample");
    Prng rng(seed);
    RankRow row{f.order, f.ambient_dim(), 0, 0, true, {}};
    while (row.sample_ranks.size() < samples) {
        std::size_t attempts = 0;
        while (true) {
            if (++attempts > 32) throw AllSamplesSingular();
            Point at = random_jet_point(f.espec, f.order, rng);
            try {
                row.sample_ranks.push_back(rank(f.rows_at(at)));
                break;
            } catch (const DivisionByZero&) {
            } catch (const SingularLinearPart&) {
            }
        }
    }
    for (std::size_t r : row.sample_ranks) row.rank = std::max(row.rank, r);
    for (std::size_t r : row.sample_ranks)
        if (r != row.rank) row.constant_rank = false;
    row.codim = row.ambient - row.rank;
    return row;
}

// Ranks across orders 0..kmax at matched sample points (every order sees the
// restriction of the same random jet), plus the projection-kernel dims.
template <class MakeFrame>
RankReport rank_table(MakeFrame make, std::uint32_t kmax, std::size_t samples,
                      std::uint64_t seed) {
    if (samples < 1) throw SchemaError("rank sampling needs at least one sample");
    std::vector<DistributionFrame> frames;
    for (std::uint32_t k = 0; k <= kmax; ++k) frames.push_back(make(k));
    RankReport rep{seed, samples, {}, {}};
    for (std::uint32_t k = 0; k <= kmax; ++k)
        rep.rows.push_back(RankRow{k, frames[k].ambient_dim(), 0, 0, true, {}});
    Prng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t attempts = 0;
        while (true) {
            if (++attempts > 32) throw AllSamplesSingular();
            Point at = random_jet_point(frames[kmax].espec, kmax, rng);
            try {
                std::vector<std::size_t> ranks;
                for (std::uint32_t k = 0; k <= kmax; ++k)
                    ranks.push_back(rank(frames[k].rows_at(at)));
                for (std::uint32_t k = 0; k <= kmax; ++k)
                    rep.rows[k].sample_ranks.push_back(ranks[k]);
                break;
            } catch (const DivisionByZero&) {
            } catch (const SingularLinearPart&) {
            }
        }
    }
    for (auto& row : rep.rows) {
        for (std::size_t r : row.sample_ranks) row.rank = std::max(row.rank, r);
        for (std::size_t r : row.sample_ranks)
            if (r != row.rank) row.constant_rank = false;
        row.codim = row.ambient - row.rank;
    }
    for (std::uint32_t k = 1; k <= kmax; ++k)
        rep.kernel_dims.push_back(rep.rows[k].rank - rep.rows[k - 1].rank);
    return rep;
}

// ---- projection kernels and their prolongation law ----

// The part of the distribution killed by forgetting the top jet order, as a
// subspace of top-order vertical directions.
inline SymbolSpace projection_kernel(const DistributionFrame& f, const Point& at) {
    if (f.order < 1) throw OrderMismatch("projection kernel needs order >= 1");
    MatQ m = f.rows_at(at);
    std::size_t n = f.espec.base_dim(), w = f.espec.fiber_dim();
    std::size_t top = w * multi_indices_of_order(n, f.order).size();
    std::size_t lower = m.cols - top;
    MatQ low(m.rows, lower);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < lower; ++c) low.at(r, c) = m.at(r, c);
    std::vector<VecQ> images;
    for (const VecQ& c : nullspace(detail::transpose(low))) {
        VecQ img(top, Rational(0));
        for (std::size_t r = 0; r < m.rows; ++r) {
            if (c[r] == 0) continue;
            for (std::size_t t = 0; t < top; ++t) img[t] += c[r] * m.at(r, lower + t);
        }
        images.push_back(std::move(img));
    }
    if (images.empty()) return SymbolSpace::zero(n, w, f.order);
    std::vector<VecQ> basis = row_space_basis(MatQ::from_rows(images));
    if (basis.empty()) return SymbolSpace::zero(n, w, f.order);
    return SymbolSpace(n, w, f.order, basis);
}

struct FiltrationRow {
    std::uint32_t order = 0;  // kernel of the projection from this order down
    std::size_t kernel_dim = 0;
    bool constant_dim = true;
    // order >= 2: kernel equals the algebraic prolongation of the previous
    // kernel at every sample
    bool matches_prolongation = true;
};

struct FiltrationReport {
    std::vector<FiltrationRow> rows;  // orders 1..kmax
    // smallest order from which every later kernel is the prolongation of
    // its predecessor; nullopt when the tail never settles
    std::optional<std::uint32_t> stable_from;
};

template <class MakeFrame>
FiltrationReport kernel_filtration(MakeFrame make, std::uint32_t kmax,
                                   std::size_t samples, std::uint64_t seed) {
    if (kmax < 1) throw OrderMismatch("filtration needs at least order 1");
    std::vector<DistributionFrame> frames;
    for (std::uint32_t k = 0; k <= kmax; ++k) frames.push_back(make(k));
    FiltrationReport rep;
    for (std::uint32_t k = 1; k <= kmax; ++k)
        rep.rows.push_back(FiltrationRow{k, 0, true, true});
    Prng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t attempts = 0;
        while (true) {
            if (++attempts > 32) throw AllSamplesSingular();
            Point at = random_jet_point(frames[kmax].espec, kmax, rng);
            try {
                std::vector<SymbolSpace> kers;
                for (std::uint32_t k = 1; k <= kmax; ++k)
                    kers.push_back(projection_kernel(frames[k], at));
                for (std::uint32_t k = 1; k <= kmax; ++k) {
                    FiltrationRow& row = rep.rows[k - 1];
                    if (s == 0)
                        row.kernel_dim = kers[k - 1].dim();
                    else if (row.kernel_dim != kers[k - 1].dim())
                        row.constant_dim = false;
                    if (k >= 2 &&
                        !symbols_equal(kers[k - 1], algebraic_prolong(kers[k - 2])))
                        row.matches_prolongation = false;
                }
                break;
            } catch (const DivisionByZero&) {
            } catch (const SingularLinearPart&) {
            }
        }
    }
    for (std::uint32_t k = kmax; k >= 2; --k) {
        if (!rep.rows[k - 1].matches_prolongation) break;
        rep.stable_from = k - 1;
    }
    return rep;
}

// ---- transitivity ----

struct TransitivityReport {
    std::vector<bool> per_sample;
    bool transitive = true;  // all samples pass
};

inline TransitivityReport transitivity_check(const std::vector<BaseField>& gens,
                                             std::size_t samples, std::uint64_t seed) {
    if (gens.empty()) throw SchemaError("transitivity needs at least one generator");
    Prng rng(seed);
    std::size_t n = gens[0].base.size();
    TransitivityReport rep;
    for (std::size_t s = 0; s < samples; ++s) {
        Point at;
        for (std::size_t i = 0; i < n; ++i) at[gens[0].xs[i]] = rng.small_rational();
        MatQ m(gens.size(), n);
        for (std::size_t g = 0; g < gens.size(); ++g)
            for (std::size_t i = 0; i < n; ++i)
                m.at(g, i) = eval_rational(gens[g].xi[i], at);
        bool ok = rank(m) == n;
        rep.per_sample.push_back(ok);
        rep.transitive = rep.transitive && ok;
    }
    return rep;
}

inline TransitivityReport transitivity_check(const std::vector<VectorField>& gens,
                                             std::size_t samples, std::uint64_t seed) {
    if (gens.empty()) throw SchemaError("transitivity needs at least one generator");
    Prng rng(seed);
    const JetSpec& spec = gens[0].spec;
    std::size_t dim = spec.base_dim() + spec.fiber_dim();
    TransitivityReport rep;
    for (std::size_t s = 0; s < samples; ++s) {
        Point at = random_jet_point(spec, 0, rng);
        MatQ m(gens.size(), dim);
        for (std::size_t g = 0; g < gens.size(); ++g) {
            for (std::size_t i = 0; i < spec.base_dim(); ++i)
                m.at(g, i) = eval_rational(gens[g].xi[i], at);
            for (std::size_t mu = 0; mu < spec.fiber_dim(); ++mu)
                m.at(g, spec.base_dim() + mu) = eval_rational(gens[g].phi[mu], at);
        }
        bool ok = rank(m) == dim;
        rep.per_sample.push_back(ok);
        rep.transitive = rep.transitive && ok;
    }
    return rep;
}

// Solution-sheaf variant: order-0 projections of the order-q solution fiber
// must span the base tangent space at each sampled point.
inline TransitivityReport transitivity_check(const LinearJetSystem& sys, std::uint32_t q,
                                             std::size_t samples, std::uint64_t seed) {
    if (q < sys.order) throw OrderMismatch("transitivity order below the system order");
    LinearJetSystem big = q > sys.order ? prolong_system(sys, q - sys.order) : sys;
    Prng rng(seed);
    std::size_t n = big.vfspec.base_dim(), w = big.field_dim();
    TransitivityReport rep;
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t attempts = 0;
        while (true) {
            if (++attempts > 32) throw AllSamplesSingular();
            Point at;
            for (std::size_t i = 0; i < n; ++i) at[big.vfspec.x(i)] = rng.small_rational();
            try {
                auto kern = big.kernel_basis(at);
                MatQ m(kern.size(), w);
                for (std::size_t r = 0; r < kern.size(); ++r)
                    for (std::size_t c = 0; c < w; ++c) m.at(r, c) = kern[r][c];
                bool ok = rank(m) == w;
                rep.per_sample.push_back(ok);
                rep.transitive = rep.transitive && ok;
                break;
            } catch (const DivisionByZero&) {
            }
        }
    }
    return rep;
}

// ---- involutivity of the distribution ----

// Brackets of prolonged generators are prolongations of base brackets, so
// the frame closes under bracket with the same structure constants, one
// order down. Verified coefficientwise as expressions.
inline bool distribution_involutive(const std::vector<VectorField>& gens,
                                    std::uint32_t k, std::uint64_t seed = 17) {
    if (k < 1) throw OrderMismatch("involutivity check needs order >= 1");
    auto c = structure_constants(gens, seed);
    std::vector<ProlongedField> prol;
    for (const auto& g : gens) prol.emplace_back(g, k);
    const JetSpec& spec = gens[0].spec;
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j) {
            ProlongedField br = jet_bracket(prol[i], prol[j]);
            VectorField combo = gens[0] * Expr();
            for (std::size_t a = 0; a < gens.size(); ++a)
                combo = combo + gens[a] * Expr::from_rational(c[i][j][a]);
            ProlongedField expect(combo, k - 1);
            for (std::size_t b = 0; b < spec.base_dim(); ++b)
                if (!(br.xi(b) - expect.xi(b)).is_zero()) return false;
            for (SymbolId id : spec.fiber_coordinates(k - 1)) {
                auto coord = spec.classify(id);
                if (!(br.coeff(coord->first, coord->second) -
                      expect.coeff(coord->first, coord->second))
                         .is_zero())
                    return false;
            }
        }
    return true;
}

} // namespace jetforge

#endif
