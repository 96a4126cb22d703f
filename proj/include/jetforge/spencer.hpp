#ifndef JETFORGE_SPENCER_HPP
#define JETFORGE_SPENCER_HPP

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "jetforge/structures.hpp"

namespace jetforge {

namespace detail {

inline std::size_t symbol_index_pos(const std::vector<MultiIndex>& idx,
                                    const MultiIndex& j) {
    for (std::size_t p = 0; p < idx.size(); ++p)
        if (idx[p] == j) return p;
    throw OrderMismatch("multi-index outside the symbol's order");
}

} // namespace detail

// A subspace of the order-q symbol module: W-tuples of homogeneous degree-q
// forms. Ambient coordinates are (component w, multi-index J), w major, J in
// the canonical order-q enumeration.
struct SymbolSpace {
    std::size_t n = 0, W = 0;
    std::uint32_t q = 0;
    std::vector<VecQ> basis;

    SymbolSpace(std::size_t n_, std::size_t W_, std::uint32_t q_,
                std::vector<VecQ> basis_)
        : n(n_), W(W_), q(q_), basis(std::move(basis_)) {
        if (n == 0 || W == 0) throw SchemaError("symbol space needs n, W >= 1");
        for (const auto& v : basis)
            if (v.size() != ambient_dim())
                throw SchemaError("symbol basis vector has the wrong length");
        if (!basis.empty() && rank(MatQ::from_rows(basis)) != basis.size())
            throw SchemaError("symbol basis is linearly dependent");
    }

    static SymbolSpace full(std::size_t n, std::size_t W, std::uint32_t q) {
        std::size_t d = W * multi_indices_of_order(n, q).size();
        std::vector<VecQ> b(d, VecQ(d, Rational(0)));
        for (std::size_t i = 0; i < d; ++i) b[i][i] = Rational(1);
        return SymbolSpace(n, W, q, std::move(b));
    }

    static SymbolSpace zero(std::size_t n, std::size_t W, std::uint32_t q) {
        return SymbolSpace(n, W, q, {});
    }

    std::size_t ambient_dim() const {
        return W * multi_indices_of_order(n, q).size();
    }
    std::size_t dim() const { return basis.size(); }

    // Rows whose joint kernel is the subspace.
    std::vector<VecQ> annihilator() const {
        if (basis.empty()) {
            std::vector<VecQ> rows(ambient_dim(), VecQ(ambient_dim(), Rational(0)));
            for (std::size_t i = 0; i < rows.size(); ++i) rows[i][i] = Rational(1);
            return rows;
        }
        return nullspace(MatQ::from_rows(basis));
    }
};

inline bool symbols_equal(const SymbolSpace& a, const SymbolSpace& b) {
    if (a.n != b.n || a.W != b.W || a.q != b.q) return false;
    if (a.dim() != b.dim()) return false;
    if (a.dim() == 0) return true;
    return subspace_equal(a.basis, b.basis);
}

// The formal-derivative shift S^qT*(x)W -> S^{q-1}T*(x)W in direction i:
// (shift_i tau)(w, J) = tau(w, J + e_i).
inline MatQ shift_matrix(std::size_t n, std::size_t W, std::uint32_t q,
                         std::size_t i) {
    if (q == 0) throw OrderMismatch("cannot lower a symbol of order 0");
    auto hi = multi_indices_of_order(n, q);
    auto lo = multi_indices_of_order(n, q - 1);
    MatQ m(W * lo.size(), W * hi.size());
    for (std::size_t w = 0; w < W; ++w)
        for (std::size_t r = 0; r < lo.size(); ++r) {
            std::size_t c = detail::symbol_index_pos(hi, lo[r].plus(i));
            m.at(w * lo.size() + r, w * hi.size() + c) = Rational(1);
        }
    return m;
}

// First algebraic prolongation: all order-(q+1) symbols whose every shift
// lands in g. Constraints: annihilator rows composed with each shift.
inline SymbolSpace algebraic_prolong(const SymbolSpace& g) {
    std::size_t d_hi = g.W * multi_indices_of_order(g.n, g.q + 1).size();
    auto ann = g.annihilator();
    std::vector<MatQ> shifts;
    for (std::size_t i = 0; i < g.n; ++i)
        shifts.push_back(shift_matrix(g.n, g.W, g.q + 1, i));
    MatQ cons(ann.size() * g.n, d_hi);
    std::size_t r = 0;
    for (const auto& a : ann)
        for (std::size_t i = 0; i < g.n; ++i, ++r)
            for (std::size_t c = 0; c < d_hi; ++c) {
                Rational acc(0);
                for (std::size_t k = 0; k < a.size(); ++k)
                    if (a[k] != 0 && shifts[i].at(k, c) != 0)
                        acc += a[k] * shifts[i].at(k, c);
                cons.at(r, c) = acc;
            }
    return SymbolSpace(g.n, g.W, g.q + 1, nullspace(cons));
}

inline SymbolSpace algebraic_prolong(const SymbolSpace& g, std::uint32_t times) {
    SymbolSpace out = g;
    for (std::uint32_t t = 0; t < times; ++t) out = algebraic_prolong(out);
    return out;
}

// Symbol of a linear system at a point: kernel of the block of the fiber
// matrix that touches only the top-order unknowns (the trailing columns).
inline SymbolSpace symbol_of(const LinearJetSystem& sys, const Point& at) {
    MatQ m = sys.fiber_matrix(at);
    std::size_t n = sys.vfspec.base_dim();
    std::size_t dq =
        sys.field_dim() * multi_indices_of_order(n, sys.order).size();
    MatQ top(m.rows, dq);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < dq; ++c)
            top.at(r, c) = m.at(r, m.cols - dq + c);
    return SymbolSpace(n, sys.field_dim(), sys.order, nullspace(top));
}

// Strictly increasing index tuples: the canonical wedge-degree-p basis.
inline std::vector<IndexTuple> wedge_tuples(std::size_t n, std::size_t p) {
    if (p == 0) return {IndexTuple{}};
    return covariant_tuples(n, p, Symmetry::antisymmetric);
}

// The Spencer coboundary on wedge(p)(x)S^q(x)W with values one step down
// the symmetric degree and one step up the wedge degree.
struct DeltaMap {
    std::size_t n = 0, W = 0;
    std::uint32_t q = 0;
    std::size_t p = 0;
    MatQ matrix;
};

inline DeltaMap delta_map(std::size_t n, std::size_t W, std::uint32_t q,
                          std::size_t p) {
    if (q == 0) throw OrderMismatch("coboundary needs symmetric degree >= 1");
    auto mq = multi_indices_of_order(n, q);
    auto mq1 = multi_indices_of_order(n, q - 1);
    auto wp = wedge_tuples(n, p);
    auto wp1 = wedge_tuples(n, p + 1);
    std::map<IndexTuple, std::size_t> wpos;
    for (std::size_t a = 0; a < wp.size(); ++a) wpos[wp[a]] = a;

    DeltaMap d{n, W, q, p,
               MatQ(wp1.size() * W * mq1.size(), wp.size() * W * mq.size())};
    for (std::size_t b = 0; b < wp1.size(); ++b) {
        const IndexTuple& big = wp1[b];
        for (std::size_t t = 0; t < big.size(); ++t) {
            IndexTuple rest = big;
            rest.erase(rest.begin() + static_cast<long>(t));
            std::size_t a = wpos.at(rest);
            Rational sign((t % 2 == 0) ? 1 : -1);
            for (std::size_t w = 0; w < W; ++w)
                for (std::size_t r = 0; r < mq1.size(); ++r) {
                    std::size_t c = detail::symbol_index_pos(mq, mq1[r].plus(big[t]));
                    std::size_t row = (b * W + w) * mq1.size() + r;
                    std::size_t col = (a * W + w) * mq.size() + c;
                    d.matrix.at(row, col) += sign;
                }
        }
    }
    return d;
}

// Cartan's test data: dimensions of the symbol cut down by an increasing
// generic flag, the characters they induce, and the involutivity verdict.
struct CartanReport {
    std::vector<std::size_t> restricted_dims;  // dim g_(0) .. g_(n)
    std::vector<std::size_t> characters;       // tau_1 .. tau_n
    std::size_t prolong_dim = 0;
    std::size_t character_bound = 0;  // sum of i * tau_i
    bool involutive = false;
};

namespace detail {

// Contraction with a single vector: sum of v_i * shift_i.
inline MatQ contraction_matrix(const SymbolSpace& g, const VecQ& v) {
    MatQ out;
    for (std::size_t i = 0; i < g.n; ++i) {
        MatQ s = shift_matrix(g.n, g.W, g.q, i);
        if (out.rows == 0) out = MatQ(s.rows, s.cols);
        for (std::size_t r = 0; r < s.rows; ++r)
            for (std::size_t c = 0; c < s.cols; ++c)
                if (s.at(r, c) != 0) out.at(r, c) += v[i] * s.at(r, c);
    }
    return out;
}

inline std::vector<std::size_t> flag_dims(const SymbolSpace& g,
                                          const std::vector<VecQ>& flag) {
    std::vector<VecQ> rows = g.annihilator();
    std::vector<std::size_t> dims;
    dims.push_back(g.dim());
    for (std::size_t i = 0; i < g.n; ++i) {
        MatQ c = contraction_matrix(g, flag[i]);
        for (std::size_t r = 0; r < c.rows; ++r) rows.push_back(c.row(r));
        MatQ stacked = MatQ::from_rows(rows);
        dims.push_back(g.ambient_dim() - rank(stacked));
    }
    return dims;
}

} // namespace detail

// Characters from the lexicographically smallest flag-dimension sequence
// across independently seeded random flags; smaller is more generic.
inline CartanReport cartan_characters(const SymbolSpace& g, std::uint64_t seed = 1,
                                      std::size_t flags = 3) {
    if (g.q < 1) throw OrderMismatch("characters need a symbol of order >= 1");
    CartanReport rep;
    for (std::size_t f = 0; f < flags; ++f) {
        Prng rng(seed + 0x9e3779b97f4a7c15ULL * (f + 1));
        std::vector<VecQ> flag;
        std::size_t attempts = 0;
        while (true) {
            if (++attempts > 32) throw DegenerateFlag();
            flag.clear();
            MatQ m(g.n, g.n);
            for (std::size_t i = 0; i < g.n; ++i) {
                VecQ v;
                for (std::size_t j = 0; j < g.n; ++j) v.push_back(rng.small_rational());
                flag.push_back(v);
                for (std::size_t j = 0; j < g.n; ++j) m.at(i, j) = v[j];
            }
            if (rank(m) == g.n) break;
        }
        auto dims = detail::flag_dims(g, flag);
        if (f == 0 || dims < rep.restricted_dims) rep.restricted_dims = dims;
    }
    for (std::size_t i = 1; i <= g.n; ++i)
        rep.characters.push_back(rep.restricted_dims[i - 1] - rep.restricted_dims[i]);
    rep.prolong_dim = algebraic_prolong(g).dim();
    rep.character_bound = 0;
    for (std::size_t i = 1; i <= g.n; ++i)
        rep.character_bound += i * rep.characters[i - 1];
    rep.involutive = (rep.prolong_dim == rep.character_bound);
    return rep;
}

// The flat connection-free derivative on jet-section families: compares the
// honest x-derivative of each component with the component one order up.
// Components are indexed like spec.fiber_coordinates(k+1); the result has
// one row per base direction, columns like spec.fiber_coordinates(k).
inline std::vector<std::vector<Expr>> spencer_D(const std::vector<Expr>& comps,
                                                std::uint32_t k,
                                                const JetSpec& spec) {
    auto hi = spec.fiber_coordinates(k + 1);
    if (comps.size() != hi.size())
        throw OrderMismatch("family must provide all components through order k+1");
    for (const auto& e : comps)
        for (SymbolId s : e.symbols())
            if (SymbolTable::instance().info(s).kind == SymbolKind::Jet)
                throw InputError("family components must be functions of the base variables");
    std::map<std::pair<std::size_t, MultiIndex>, std::size_t> pos;
    for (std::size_t i = 0; i < hi.size(); ++i) {
        auto c = spec.classify(hi[i]);
        pos[{c->first, c->second}] = i;
    }
    auto lo = spec.fiber_coordinates(k);
    std::size_t n = spec.base_dim();
    std::vector<std::vector<Expr>> out(n, std::vector<Expr>(lo.size()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < lo.size(); ++c) {
            auto coord = spec.classify(lo[c]);
            out[i][c] = diff(comps[pos.at({coord->first, coord->second})], spec.x(i)) -
                        comps[pos.at({coord->first, coord->second.plus(i)})];
        }
    return out;
}

// Exact check that prolonged-field coefficients restricted along an
// arbitrary (not necessarily holonomic) jet-section family satisfy the
// derivative/shift compatibility identity: writing V^mu_J for the vertical
// component of the restricted order-k field, the mismatch between d_i V^mu_J
// and V^mu_{J+e_i} is controlled exactly by the family's own holonomy
// defect. For holonomic families both sides vanish.
inline bool lambda_D_commutation_check(const VectorField& v,
                                       const std::vector<Expr>& family,
                                       std::uint32_t k) {
    const JetSpec& spec = v.spec;
    std::size_t n = spec.base_dim();
    ProlongedField pk = prolong(v, k);

    auto hi = spec.fiber_coordinates(k + 1);
    if (family.size() != hi.size())
        throw OrderMismatch("family must provide all components through order k+1");
    std::map<std::pair<std::size_t, MultiIndex>, std::size_t> pos;
    Bindings sigma;
    for (std::size_t i = 0; i < hi.size(); ++i) {
        auto c = spec.classify(hi[i]);
        pos[{c->first, c->second}] = i;
        sigma[hi[i]] = family[i];
    }
    auto Ds = spencer_D(family, k, spec);
    auto lo = spec.fiber_coordinates(k);
    std::map<std::pair<std::size_t, MultiIndex>, std::size_t> lopos;
    for (std::size_t c = 0; c < lo.size(); ++c) {
        auto coord = spec.classify(lo[c]);
        lopos[{coord->first, coord->second}] = c;
    }

    // Restricted vertical components V^mu_J, |J| <= k.
    std::map<std::pair<std::size_t, MultiIndex>, Expr> V;
    for (std::size_t mu = 0; mu < spec.fiber_dim(); ++mu)
        for (std::uint32_t h = 0; h <= k; ++h)
            for (const auto& J : multi_indices_of_order(n, h)) {
                Expr val = subs(pk.coeff(mu, J), sigma);
                for (std::size_t j = 0; j < n; ++j)
                    val = val - subs(v.xi[j], sigma) * family[pos.at({mu, J.plus(j)})];
                V[{mu, J}] = val;
            }

    for (std::size_t mu = 0; mu < spec.fiber_dim(); ++mu)
        for (std::uint32_t h = 0; h + 1 <= k; ++h)
            for (const auto& J : multi_indices_of_order(n, h))
                for (std::size_t i = 0; i < n; ++i) {
                    Expr lhs = diff(V.at({mu, J}), spec.x(i)) - V.at({mu, J.plus(i)});
                    Expr rhs;
                    for (std::size_t c = 0; c < lo.size(); ++c) {
                        auto coord = spec.classify(lo[c]);
                        Expr dphi = diff(pk.coeff(mu, J), lo[c]);
                        if (!dphi.is_zero()) rhs = rhs + subs(dphi, sigma) * Ds[i][c];
                    }
                    for (std::size_t j = 0; j < n; ++j) {
                        for (std::size_t nu = 0; nu < spec.fiber_dim(); ++nu) {
                            Expr dxi = diff(v.xi[j], spec.u(nu));
                            if (dxi.is_zero()) continue;
                            rhs = rhs - subs(dxi, sigma) *
                                            Ds[i][lopos.at({nu, MultiIndex(n)})] *
                                            family[pos.at({mu, J.plus(j)})];
                        }
                        rhs = rhs - subs(v.xi[j], sigma) * Ds[i][lopos.at({mu, J.plus(j)})];
                    }
                    if (!(lhs - rhs).is_zero()) return false;
                }
    return true;
}

} // namespace jetforge

#endif
