#ifndef JETFORGE_STRUCTURES_HPP
#define JETFORGE_STRUCTURES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jetforge/linalg.hpp"
#include "jetforge/prng.hpp"
#include "jetforge/tensor.hpp"

namespace jetforge {

// Canonical names for the components of an unknown vector field on the base.
inline std::vector<std::string> vf_component_names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("xi" + std::to_string(i + 1));
    return out;
}

// Bind base coordinates of a jet space to rational values.
inline Point bind_base(const JetSpec& spec, const std::vector<Rational>& xs) {
    if (xs.size() != spec.base_dim())
        throw OrderMismatch("base point dimension does not match the chart");
    Point p;
    for (std::size_t i = 0; i < xs.size(); ++i) p[spec.x(i)] = xs[i];
    return p;
}

// A linear homogeneous PDE system for the components of a vector field on
// the base manifold. Unknowns are the jet coordinates of the field through
// `order`; coefficients are expressions in the base variables only.
struct LinearJetSystem {
    JetSpec vfspec;  // base variables plus one dependent per field component
    std::uint32_t order = 1;
    std::vector<Expr> equations;

    std::size_t field_dim() const { return vfspec.fiber_dim(); }

    // Unknown columns: all jet coordinates of the field, orders 0..order,
    // component-major inside each order.
    std::vector<SymbolId> unknowns() const { return vfspec.fiber_coordinates(order); }

    // The coefficient matrix of the system at a base point. Every equation
    // must be linear homogeneous in the unknowns; anything else is a
    // construction bug and is reported as a schema violation.
    MatQ fiber_matrix(const Point& at) const {
        std::vector<SymbolId> cols = unknowns();
        MatQ m(equations.size(), cols.size());
        for (std::size_t r = 0; r < equations.size(); ++r) {
            Expr residual = equations[r];
            for (std::size_t c = 0; c < cols.size(); ++c) {
                Expr coeff = diff(equations[r], cols[c]);
                for (SymbolId s : coeff.symbols())
                    if (SymbolTable::instance().info(s).kind == SymbolKind::Jet)
                        throw SchemaError("equation is not linear in the jet unknowns");
                residual = residual - coeff * Expr::sym(cols[c]);
                m.at(r, c) = eval_rational(coeff, at);
            }
            if (!residual.is_zero())
                throw SchemaError("equation has a term outside the unknown span");
        }
        return m;
    }

    std::size_t fiber_rank(const Point& at) const { return rank(fiber_matrix(at)); }

    // Dimension of the solution fiber (kernel of the coefficient matrix).
    std::size_t solution_dim(const Point& at) const {
        return unknowns().size() - fiber_rank(at);
    }

    std::vector<VecQ> kernel_basis(const Point& at) const {
        return nullspace(fiber_matrix(at));
    }
};

// First-order system cutting out the infinitesimal automorphisms of S: the
// components of the Lie derivative of S along an unknown field, written as
// linear forms in the field's first-order jet coordinates.
inline LinearJetSystem psi_S(const StructureField& S) {
    std::size_t n = S.dim();
    JetSpec vfspec(S.base, vf_component_names(n));
    auto xi0 = [&](std::size_t k) { return Expr::sym(vfspec.u(k)); };
    auto xi1 = [&](std::size_t comp, std::size_t wrt) {
        return Expr::sym(vfspec.jet(comp, MultiIndex(n).plus(wrt)));
    };
    std::vector<Expr> eqs;
    for (const auto& c : tensor_components(S.type, n)) {
        Expr e;
        Expr comp = S.full_component(c.upper, c.lower);
        for (std::size_t k = 0; k < n; ++k) e = e + xi0(k) * diff(comp, S.xs[k]);
        for (std::size_t a = 0; a < c.upper.size(); ++a)
            for (std::size_t k = 0; k < n; ++k) {
                IndexTuple up = c.upper;
                up[a] = k;
                e = e - S.full_component(up, c.lower) * xi1(c.upper[a], k);
            }
        for (std::size_t b = 0; b < c.lower.size(); ++b)
            for (std::size_t k = 0; k < n; ++k) {
                IndexTuple lo = c.lower;
                lo[b] = k;
                e = e + S.full_component(c.upper, lo) * xi1(k, c.lower[b]);
            }
        eqs.push_back(e);
    }
    return {std::move(vfspec), 1, std::move(eqs)};
}

// Adjoin all total derivatives of order 1..h of every equation. h = 0 gives
// the system back unchanged. Original equations come first, then the
// derivative levels, each level in equation-major order.
inline LinearJetSystem prolong_system(const LinearJetSystem& sys, std::uint32_t h) {
    LinearJetSystem out{sys.vfspec, sys.order + h, sys.equations};
    std::size_t n = sys.vfspec.base_dim();
    for (std::uint32_t lvl = 1; lvl <= h; ++lvl)
        for (const Expr& eq : sys.equations)
            for (const auto& alpha : multi_indices_of_order(n, lvl))
                out.equations.push_back(total_derivative(eq, alpha, sys.vfspec));
    return out;
}

// The order-q linear system for infinitesimal automorphisms of S: the
// (q-1)-fold prolongation of the first-order system.
inline LinearJetSystem lie_equation(const StructureField& S, std::uint32_t q) {
    if (q < 1) throw OrderMismatch("automorphism system needs order >= 1");
    return prolong_system(psi_S(S), q - 1);
}

// Kernel vectors with vanishing order-0 part: jets of fields fixing the
// point. The order-0 columns are the leading field_dim() unknowns.
inline std::vector<VecQ> isotropy_fiber(const LinearJetSystem& sys, const Point& at) {
    MatQ m = sys.fiber_matrix(at);
    std::size_t n0 = sys.field_dim();
    MatQ stacked(m.rows + n0, m.cols);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) stacked.at(r, c) = m.at(r, c);
    for (std::size_t i = 0; i < n0; ++i) stacked.at(m.rows + i, i) = Rational(1);
    return nullspace(stacked);
}

// Values of a section jet's derivative coordinates, aligned with
// spec.fiber_coordinates(k). Lets solution candidates be plugged into a
// fiber matrix directly.
inline VecQ section_jet_coordinates(const PolyJet& jet, const JetSpec& spec,
                                    std::uint32_t k) {
    VecQ out;
    for (SymbolId s : spec.fiber_coordinates(k)) {
        auto coord = spec.classify(s);
        if (!coord) throw UnknownSymbol("coordinate does not belong to the chart");
        out.push_back(jet.derivative(coord->first, coord->second));
    }
    return out;
}

// Does the map jet carry the structure's section jet at its source to the
// section jet at its target? Z must have one order more than the section
// jets being compared.
inline bool automorphism_test(const PolyJet& Z, const StructureField& S,
                              std::uint32_t k) {
    if (Z.ord != k + 1)
        throw OrderMismatch("map jet must carry one order more than the test order");
    PolyJet src = structure_jet(S, Z.source, k);
    PolyJet dst = structure_jet(S, Z.target, k);
    return jets_identical(tensor_transport(Z, src, S.type), dst);
}

// Pull the structure's section jet at the map's target back through the
// map: transport along the inverse jet. The result is a section jet at the
// map's source point.
inline PolyJet phi_S(const PolyJet& Z, const StructureField& S, std::uint32_t k) {
    if (Z.ord != k + 1)
        throw OrderMismatch("map jet must carry one order more than the pullback order");
    PolyJet Zi = polyjet_invert(Z);
    return tensor_transport(Zi, structure_jet(S, Z.target, k), S.type);
}

// An affine system A z = rhs over a fixed list of scalar unknowns.
struct AffineSystem {
    std::vector<SymbolId> unknowns;
    MatQ A;
    VecQ rhs;

    bool consistent() const { return static_cast<bool>(solve(A, rhs)); }
    std::optional<VecQ> particular() const { return solve(A, rhs); }
    std::vector<VecQ> homogeneous_basis() const { return nullspace(A); }

    // Dimension of the solution set; empty when inconsistent.
    std::optional<std::size_t> solution_dim() const {
        if (!consistent()) return std::nullopt;
        return A.cols - rank(A);
    }
};

namespace detail {

inline TruncSeries<Expr> series_to_expr(const TruncSeries<Rational>& s,
                                        std::uint32_t ord) {
    TruncSeries<Expr> out(s.nvars, ord);
    for (const auto& [j, v] : s.terms)
        if (v != 0) out.terms[j] = Expr::from_rational(v);
    return out;
}

inline std::vector<Expr> point_to_expr(const std::vector<Rational>& p) {
    std::vector<Expr> out;
    for (const auto& v : p) out.push_back(Expr::from_rational(v));
    return out;
}

} // namespace detail

// The fiber of the order-(k+1) automorphism equations over a given order-k
// map jet X: the top-order Taylor coefficients of any extension of X enter
// the transported section jet affinely, and this extracts that affine
// system exactly. X must already be an automorphism at order k-1.
inline AffineSystem nonlinear_symbol_system(const PolyJet& X, const StructureField& S,
                                            std::uint32_t k) {
    if (k < 1) throw OrderMismatch("top-order system needs order k >= 1");
    if (X.ord != k)
        throw OrderMismatch("base jet must have order k to extend to order k+1");
    if (!automorphism_test(X, S, k - 1))
        throw PrerequisiteNotAutomorphism();

    std::size_t n = S.dim();
    // Unknowns: one parameter per component and per top-order multi-index,
    // standing for the Taylor coefficient of the extension.
    std::vector<SymbolId> params;
    PolyJetT<Expr> Ze;
    Ze.source = detail::point_to_expr(X.source);
    Ze.target = detail::point_to_expr(X.target);
    Ze.ord = k + 1;
    for (std::size_t i = 0; i < n; ++i)
        Ze.dev.push_back(detail::series_to_expr(X.dev[i], k + 1));
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& g : multi_indices_of_order(n, k + 1)) {
            std::string name = "z" + std::to_string(i + 1) + "g";
            for (std::size_t j = 0; j < n; ++j) name += std::to_string(g[j]);
            SymbolId p = intern_param(name);
            params.push_back(p);
            Ze.dev[i].terms[g] = Expr::sym(p);
        }

    PolyJetT<Expr> src = [&] {
        PolyJet j = structure_jet(S, X.source, k);
        PolyJetT<Expr> out;
        out.source = detail::point_to_expr(j.source);
        out.target.reserve(j.target.size());
        for (const auto& v : j.target) out.target.push_back(Expr::from_rational(v));
        out.ord = k;
        for (const auto& s : j.dev) out.dev.push_back(detail::series_to_expr(s, k));
        return out;
    }();
    PolyJet dst = structure_jet(S, X.target, k);

    PolyJetT<Expr> moved = tensor_transport(Ze, src, S.type);

    // Collect every coefficient of (moved - dst) as an affine row in the
    // parameters; residual symbols would mean the system is not affine,
    // which the transport construction rules out.
    std::vector<Expr> rows;
    for (std::size_t c = 0; c < moved.dev.size(); ++c) {
        rows.push_back(moved.target[c] - Expr::from_rational(dst.target[c]));
        TruncSeries<Expr> d = moved.dev[c] - detail::series_to_expr(dst.dev[c], k);
        for (const auto& [j, v] : d.terms) rows.push_back(v);
    }

    AffineSystem out;
    out.unknowns = params;
    out.A = MatQ(rows.size(), params.size());
    out.rhs.assign(rows.size(), Rational(0));
    Point empty;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Expr residual = rows[r];
        for (std::size_t c = 0; c < params.size(); ++c) {
            Expr coeff = diff(rows[r], params[c]);
            if (!coeff.symbols().empty())
                throw SchemaError("top-order system is not affine in its unknowns");
            residual = residual - coeff * Expr::sym(params[c]);
            out.A.at(r, c) = eval_rational(coeff, empty);
        }
        if (!residual.symbols().empty())
            throw SchemaError("top-order system has a non-constant residual");
        out.rhs[r] = -eval_rational(residual, empty);
    }
    return out;
}

// Rank of the coefficient matrix across random rational base points. A rank
// change across samples is reported, not thrown: downstream code decides
// how much regularity it needs.
struct RegularityReport {
    std::vector<std::size_t> ranks;
    bool constant_rank = true;
};

inline RegularityReport sample_ranks(const LinearJetSystem& sys, Prng& rng,
                                     std::size_t samples = 10) {
    RegularityReport rep;
    std::size_t attempts = 0;
    while (rep.ranks.size() < samples) {
        if (++attempts > 16 * samples)
            throw AllSamplesSingular();
        Point at;
        for (std::size_t i = 0; i < sys.vfspec.base_dim(); ++i)
            at[sys.vfspec.x(i)] = rng.small_rational();
        try {
            rep.ranks.push_back(sys.fiber_rank(at));
        } catch (const DivisionByZero&) {
            continue;  // coefficient pole; resample
        }
    }
    for (std::size_t r : rep.ranks)
        if (r != rep.ranks.front()) rep.constant_rank = false;
    return rep;
}

} // namespace jetforge

#endif
