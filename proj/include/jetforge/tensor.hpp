#ifndef JETFORGE_TENSOR_HPP
#define JETFORGE_TENSOR_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "jetforge/prolongation.hpp"

namespace jetforge {

enum class Symmetry { none, symmetric, antisymmetric };

// Tensor species: r contravariant slots, s covariant slots, with an optional
// symmetry imposed on the covariant block. Every structure in the fixture
// library is purely covariant (metrics, volume forms), but the slots stay
// general so mixed tensors ride the same code paths.
struct TensorType {
    std::size_t contravariant = 0;
    std::size_t covariant = 0;
    Symmetry sym = Symmetry::none;
};

using IndexTuple = std::vector<std::size_t>;

namespace detail {

inline void enumerate_tuples(std::size_t n, std::size_t len, bool nondecreasing,
                             bool strict, std::vector<IndexTuple>& out) {
    IndexTuple cur(len);
    auto rec = [&](auto&& self, std::size_t pos, std::size_t lo) -> void {
        if (pos == len) {
            out.push_back(cur);
            return;
        }
        for (std::size_t v = lo; v < n; ++v) {
            cur[pos] = v;
            std::size_t next_lo = 0;
            if (nondecreasing) next_lo = strict ? v + 1 : v;
            self(self, pos + 1, next_lo);
        }
    };
    rec(rec, 0, 0);
}

} // namespace detail

// Canonical covariant index tuples for the given symmetry, in lex order.
inline std::vector<IndexTuple> covariant_tuples(std::size_t n, std::size_t s, Symmetry sym) {
    std::vector<IndexTuple> out;
    if (sym == Symmetry::antisymmetric && s > n) return out;
    detail::enumerate_tuples(n, s, sym != Symmetry::none, sym == Symmetry::antisymmetric, out);
    return out;
}

inline std::vector<IndexTuple> contravariant_tuples(std::size_t n, std::size_t r) {
    std::vector<IndexTuple> out;
    detail::enumerate_tuples(n, r, false, false, out);
    return out;
}

// Canonical components: contravariant tuple major, covariant tuple minor.
struct TensorComponentIndex {
    IndexTuple upper;
    IndexTuple lower;
};

inline std::vector<TensorComponentIndex> tensor_components(const TensorType& t, std::size_t n) {
    std::vector<TensorComponentIndex> out;
    for (const auto& up : contravariant_tuples(n, t.contravariant))
        for (const auto& lo : covariant_tuples(n, t.covariant, t.sym))
            out.push_back({up, lo});
    return out;
}

inline std::size_t tensor_fiber_dim(const TensorType& t, std::size_t n) {
    return tensor_components(t, n).size();
}

// Component names: 1-based indices, contravariant block then covariant, with
// an underscore between the blocks when both are present (w12, u1_2).
inline std::string tensor_component_name(const TensorComponentIndex& c) {
    std::string name = "w";
    for (auto i : c.upper) name += std::to_string(i + 1);
    if (!c.upper.empty() && !c.lower.empty()) name += "_";
    for (auto j : c.lower) name += std::to_string(j + 1);
    return name;
}

inline std::vector<std::string> tensor_component_names(const TensorType& t, std::size_t n) {
    std::vector<std::string> out;
    for (const auto& c : tensor_components(t, n))
        out.push_back(tensor_component_name(c));
    return out;
}

// Resolve an arbitrary covariant tuple to (canonical position, sign). For
// antisymmetric slots a repeated index gives sign 0.
struct ResolvedSlot {
    std::size_t position = 0;
    int sign = 0;  // 0 means the component vanishes identically
};

inline ResolvedSlot resolve_tuple(const TensorType& t, std::size_t n,
                                  const IndexTuple& upper, const IndexTuple& lower) {
    IndexTuple lo = lower;
    int sign = 1;
    if (t.sym == Symmetry::symmetric) {
        std::sort(lo.begin(), lo.end());
    } else if (t.sym == Symmetry::antisymmetric) {
        // Bubble sort counting swaps keeps the sign exact.
        for (std::size_t i = 0; i + 1 < lo.size(); ++i)
            for (std::size_t j = 0; j + 1 < lo.size() - i; ++j)
                if (lo[j] > lo[j + 1]) {
                    std::swap(lo[j], lo[j + 1]);
                    sign = -sign;
                }
        for (std::size_t i = 0; i + 1 < lo.size(); ++i)
            if (lo[i] == lo[i + 1]) return {0, 0};
    }
    auto comps = tensor_components(t, n);
    for (std::size_t pos = 0; pos < comps.size(); ++pos)
        if (comps[pos].upper == upper && comps[pos].lower == lo) return {pos, sign};
    throw OrderMismatch("tensor index tuple out of range");
}

// A tensor field on an n-dimensional base: canonical components as
// expressions in the base variables.
struct StructureField {
    std::vector<std::string> base;
    std::vector<SymbolId> xs;
    TensorType type;
    std::vector<Expr> comps;

    StructureField(std::vector<std::string> base_names, TensorType t,
                   std::vector<Expr> components)
        : base(std::move(base_names)), type(t), comps(std::move(components)) {
        for (std::size_t i = 0; i < base.size(); ++i)
            xs.push_back(intern_base(base[i], static_cast<std::uint32_t>(i)));
        if (comps.size() != tensor_fiber_dim(type, base.size()))
            throw SchemaError("structure component count does not match the tensor type");
        for (const auto& e : comps)
            for (SymbolId s : e.symbols())
                if (SymbolTable::instance().info(s).kind == SymbolKind::Jet)
                    throw InputError("structure components must be functions of the base variables");
    }

    std::size_t dim() const { return base.size(); }

    Expr full_component(const IndexTuple& upper, const IndexTuple& lower) const {
        ResolvedSlot slot = resolve_tuple(type, base.size(), upper, lower);
        if (slot.sign == 0) return Expr();
        Expr e = comps[slot.position];
        return slot.sign > 0 ? e : -e;
    }
};

// Vector field on the base manifold alone (no fiber directions).
struct BaseField {
    std::vector<std::string> base;
    std::vector<SymbolId> xs;
    std::vector<Expr> xi;

    BaseField(std::vector<std::string> base_names, std::vector<Expr> components)
        : base(std::move(base_names)), xi(std::move(components)) {
        for (std::size_t i = 0; i < base.size(); ++i)
            xs.push_back(intern_base(base[i], static_cast<std::uint32_t>(i)));
        if (xi.size() != base.size())
            throw SchemaError("base field component count mismatch");
        for (const auto& e : xi)
            for (SymbolId s : e.symbols()) {
                const SymbolInfo& info = SymbolTable::instance().info(s);
                if (info.kind == SymbolKind::Param) continue;
                if (info.kind == SymbolKind::Base &&
                    std::find(xs.begin(), xs.end(), s) != xs.end())
                    continue;
                throw InputError("base field component uses '" + info.name +
                                 "', which is not a base variable");
            }
    }
};

// Classical Lie derivative of a tensor field along a base vector field.
inline StructureField lie_derivative(const BaseField& v, const StructureField& S) {
    std::size_t n = S.dim();
    std::vector<Expr> out;
    for (const auto& c : tensor_components(S.type, n)) {
        Expr e;
        Expr comp = S.full_component(c.upper, c.lower);
        for (std::size_t k = 0; k < n; ++k) e = e + v.xi[k] * diff(comp, S.xs[k]);
        for (std::size_t a = 0; a < c.upper.size(); ++a) {
            for (std::size_t k = 0; k < n; ++k) {
                IndexTuple up = c.upper;
                up[a] = k;
                e = e - S.full_component(up, c.lower) * diff(v.xi[c.upper[a]], S.xs[k]);
            }
        }
        for (std::size_t b = 0; b < c.lower.size(); ++b) {
            for (std::size_t k = 0; k < n; ++k) {
                IndexTuple lo = c.lower;
                lo[b] = k;
                e = e + S.full_component(c.upper, lo) * diff(v.xi[k], S.xs[c.lower[b]]);
            }
        }
        out.push_back(e);
    }
    return StructureField(S.base, S.type, std::move(out));
}

// Complete lift of a base field to the tensor bundle: the infinitesimal
// version of pushing tensors forward along the flow. Along a concrete
// section S the vertical defect of the lift is exactly -(L_v S).
inline VectorField tensor_lift(const BaseField& v, const TensorType& type) {
    std::size_t n = v.base.size();
    JetSpec bundle(v.base, tensor_component_names(type, n));
    auto comps = tensor_components(type, n);
    auto comp_expr = [&](const IndexTuple& up, const IndexTuple& lo) {
        ResolvedSlot slot = resolve_tuple(type, n, up, lo);
        if (slot.sign == 0) return Expr();
        Expr e = Expr::sym(bundle.u(slot.position));
        return slot.sign > 0 ? e : -e;
    };
    std::vector<Expr> phi;
    for (const auto& c : comps) {
        Expr e;
        for (std::size_t a = 0; a < c.upper.size(); ++a)
            for (std::size_t k = 0; k < n; ++k) {
                IndexTuple up = c.upper;
                up[a] = k;
                e = e + comp_expr(up, c.lower) * diff(v.xi[c.upper[a]], v.xs[k]);
            }
        for (std::size_t b = 0; b < c.lower.size(); ++b)
            for (std::size_t k = 0; k < n; ++k) {
                IndexTuple lo = c.lower;
                lo[b] = k;
                e = e - comp_expr(c.upper, lo) * diff(v.xi[k], v.xs[c.lower[b]]);
            }
        phi.push_back(e);
    }
    return VectorField(bundle, v.xi, std::move(phi));
}

// The jet space a tensor structure's sections live in.
inline JetSpec structure_bundle(const StructureField& S) {
    return JetSpec(S.base, tensor_component_names(S.type, S.dim()));
}

// k-jet of the structure's section at a base point.
inline PolyJet structure_jet(const StructureField& S, const std::vector<Rational>& at,
                             std::uint32_t k) {
    JetSpec bundle = structure_bundle(S);
    return jet_of_section(S.comps, at, k, bundle);
}

// Transport of a tensor k-jet along a base-map (k+1)-jet: components are
// pulled through the inverse map with one Jacobian factor per slot
// (pushforward of the tensor field, read at the target point).
template <class K>
PolyJetT<K> tensor_transport(const PolyJetT<K>& Z, const PolyJetT<K>& jS,
                             const TensorType& type) {
    std::size_t n = Z.source_dim();
    if (Z.target_dim() != n) throw OrderMismatch("base map must be square");
    if (Z.ord != jS.ord + 1)
        throw OrderMismatch("base map jet must carry one order more than the tensor jet");
    if constexpr (!std::is_floating_point_v<K>) {
        if (!jet_points_match(Z.source, jS.source))
            throw BasePointMismatch("tensor jet is not based at the map's source");
    }
    std::uint32_t k = jS.ord;
    PolyJetT<K> Zi = polyjet_invert(Z);

    // Inverse-map deviations truncated to the tensor order, for compositions.
    std::vector<TruncSeries<K>> zi_dev;
    for (const auto& s : Zi.dev) zi_dev.push_back(s.truncated(k));

    // Jacobian of the inverse map (covariant factors), around the target.
    std::vector<std::vector<TruncSeries<K>>> B(n, std::vector<TruncSeries<K>>(n));
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t j = 0; j < n; ++j)
            B[l][j] = series_derivative(Zi.dev[l], j);

    // Jacobian of the forward map along the inverse (contravariant factors).
    std::vector<std::vector<TruncSeries<K>>> A(n, std::vector<TruncSeries<K>>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t kk = 0; kk < n; ++kk)
            A[i][kk] = series_derivative(Z.dev[i], kk).compose(zi_dev);

    // Canonical component series of S around the source, then along Zi.
    auto comps = tensor_components(type, n);
    std::vector<TruncSeries<K>> along;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        TruncSeries<K> full = jS.dev[c].truncated(k);
        full.set(MultiIndex(n), jS.target[c]);
        along.push_back(full.compose(zi_dev));
    }
    auto comp_along = [&](const IndexTuple& up, const IndexTuple& lo) {
        ResolvedSlot slot = resolve_tuple(type, n, up, lo);
        TruncSeries<K> zero(n, k);
        if (slot.sign == 0) return zero;
        return slot.sign > 0 ? along[slot.position] : -along[slot.position];
    };

    PolyJetT<K> out;
    out.source = Z.target;
    out.ord = k;
    auto uppers = contravariant_tuples(n, type.contravariant);
    auto lowers = contravariant_tuples(n, type.covariant);  // all tuples for summation
    for (const auto& c : comps) {
        TruncSeries<K> acc(n, k);
        for (const auto& ku : uppers) {
            for (const auto& kl : lowers) {
                TruncSeries<K> term = comp_along(ku, kl);
                if (term.terms.empty()) continue;
                for (std::size_t a = 0; a < c.upper.size(); ++a)
                    term = term * A[c.upper[a]][ku[a]];
                for (std::size_t b = 0; b < c.lower.size(); ++b)
                    term = term * B[kl[b]][c.lower[b]];
                acc = acc + term;
            }
        }
        out.target.push_back(acc.constant_term());
        acc.set(MultiIndex(n), K(0));
        out.dev.push_back(acc);
    }
    return out;
}

} // namespace jetforge

#endif
