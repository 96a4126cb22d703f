#ifndef JETFORGE_PROLONGATION_HPP
#define JETFORGE_PROLONGATION_HPP

#include <map>
#include <utility>
#include <vector>

#include "jetforge/jetspace.hpp"

namespace jetforge {

// Point vector field xi^i d/dx_i + phi^mu d/du^mu. Components live on the
// bundle itself: base and dependent variables plus free parameters, never
// derivative coordinates.
struct VectorField {
    JetSpec spec;
    std::vector<Expr> xi;
    std::vector<Expr> phi;

    VectorField(JetSpec sp, std::vector<Expr> xi_in, std::vector<Expr> phi_in)
        : spec(std::move(sp)), xi(std::move(xi_in)), phi(std::move(phi_in)) {
        if (xi.size() != spec.base_dim() || phi.size() != spec.fiber_dim())
            throw SchemaError("vector field component count mismatch");
        auto check = [&](const Expr& e) {
            for (SymbolId s : e.symbols()) {
                const SymbolInfo& info = SymbolTable::instance().info(s);
                if (info.kind == SymbolKind::Param) continue;
                if (spec.base_index(s)) continue;
                auto c = spec.classify(s);
                if (c && c->second.order() == 0) continue;
                throw InputError("vector field component uses '" + info.name +
                                 "', which is not a bundle coordinate");
            }
        };
        for (const auto& e : xi) check(e);
        for (const auto& e : phi) check(e);
    }

    // Derivation on functions of the bundle coordinates.
    Expr apply(const Expr& f) const {
        Expr out = Expr::from_long(0);
        for (std::size_t i = 0; i < xi.size(); ++i)
            out = out + xi[i] * diff(f, spec.x(i));
        for (std::size_t mu = 0; mu < phi.size(); ++mu)
            out = out + phi[mu] * diff(f, spec.u(mu));
        return out;
    }
};

// Lie bracket of two point fields on the same bundle, computed as the
// commutator of derivations on the coordinate functions.
inline VectorField bracket(const VectorField& a, const VectorField& b) {
    std::vector<Expr> xi, phi;
    for (std::size_t i = 0; i < a.xi.size(); ++i)
        xi.push_back(a.apply(b.xi[i]) - b.apply(a.xi[i]));
    for (std::size_t mu = 0; mu < a.phi.size(); ++mu)
        phi.push_back(a.apply(b.phi[mu]) - b.apply(a.phi[mu]));
    return VectorField(a.spec, std::move(xi), std::move(phi));
}

inline VectorField operator+(const VectorField& a, const VectorField& b) {
    std::vector<Expr> xi, phi;
    for (std::size_t i = 0; i < a.xi.size(); ++i) xi.push_back(a.xi[i] + b.xi[i]);
    for (std::size_t mu = 0; mu < a.phi.size(); ++mu) phi.push_back(a.phi[mu] + b.phi[mu]);
    return VectorField(a.spec, std::move(xi), std::move(phi));
}

inline VectorField operator*(const VectorField& a, const Expr& f) {
    std::vector<Expr> xi, phi;
    for (const auto& e : a.xi) xi.push_back(e * f);
    for (const auto& e : a.phi) phi.push_back(e * f);
    return VectorField(a.spec, std::move(xi), std::move(phi));
}

// Prolongation of a point field to the order-k jet space. Coefficients obey
//   phi^mu_{J+e_i} = D_i phi^mu_J - sum_j D_i(xi^j) u^mu_{J+e_j},
// filled along the canonical first-nonzero path; path independence is a
// theorem (and a property test), not an assumption of the table layout.
class ProlongedField {
  public:
    ProlongedField(VectorField vf, std::uint32_t k) : vf_(std::move(vf)), ord_(k) {
        const JetSpec& spec = vf_.spec;
        std::size_t n = spec.base_dim(), m = spec.fiber_dim();
        std::vector<std::vector<Expr>> dxi(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                dxi[i].push_back(total_derivative(vf_.xi[j], i, spec));
        for (std::size_t mu = 0; mu < m; ++mu)
            table_[{mu, MultiIndex(n)}] = vf_.phi[mu];
        for (std::uint32_t h = 1; h <= k; ++h) {
            for (std::size_t mu = 0; mu < m; ++mu) {
                for (const auto& j : multi_indices_of_order(n, h)) {
                    std::size_t i = j.first_nonzero();
                    MultiIndex prev = j.minus(i);
                    Expr c = total_derivative(table_.at({mu, prev}), i, spec);
                    for (std::size_t l = 0; l < n; ++l)
                        c = c - dxi[i][l] * Expr::sym(spec.jet(mu, prev.plus(l)));
                    table_[{mu, j}] = std::move(c);
                }
            }
        }
    }

    const VectorField& field() const { return vf_; }
    const JetSpec& spec() const { return vf_.spec; }
    std::uint32_t order() const { return ord_; }

    const Expr& xi(std::size_t i) const { return vf_.xi.at(i); }

    // phi^mu_J, |J| <= k. The order-0 entry is the original fiber component.
    const Expr& coeff(std::size_t mu, const MultiIndex& j) const {
        auto it = table_.find({mu, j});
        if (it == table_.end()) throw OrderMismatch("prolongation coefficient beyond table order");
        return it->second;
    }

    // Derivation on functions of the order-k jet coordinates.
    Expr apply(const Expr& f) const {
        const JetSpec& sp = vf_.spec;
        Expr out = Expr::from_long(0);
        for (SymbolId s : f.symbols()) {
            const SymbolInfo& info = SymbolTable::instance().info(s);
            if (info.kind == SymbolKind::Param) continue;
            if (auto bi = sp.base_index(s)) {
                out = out + vf_.xi[*bi] * diff(f, s);
                continue;
            }
            auto c = sp.classify(s);
            if (!c) {
                if (info.kind == SymbolKind::Jet)
                    throw InputError("jet symbol '" + info.name + "' belongs to a different chart");
                continue;
            }
            if (c->second.order() > ord_)
                throw OrderMismatch("function lives above the prolongation order");
            out = out + coeff(c->first, c->second) * diff(f, s);
        }
        return out;
    }

  private:
    ProlongedField(VectorField vf, std::uint32_t k,
                   std::map<std::pair<std::size_t, MultiIndex>, Expr> table)
        : vf_(std::move(vf)), ord_(k), table_(std::move(table)) {}

    friend ProlongedField jet_bracket(const ProlongedField&, const ProlongedField&);

    VectorField vf_;
    std::uint32_t ord_;
    std::map<std::pair<std::size_t, MultiIndex>, Expr> table_;
};

inline ProlongedField prolong(const VectorField& vf, std::uint32_t k) {
    return ProlongedField(vf, k);
}

// Bracket of prolonged fields as derivations on jet coordinates, one order
// below the inputs. The coefficients come from the genuine commutator, not
// from prolonging the base bracket, so the morphism law
//   prolong([a,b], k) == jet_bracket(prolong(a,k+1), prolong(b,k+1))
// is a theorem about this function rather than its definition.
inline ProlongedField jet_bracket(const ProlongedField& a, const ProlongedField& b) {
    if (a.order() != b.order() || a.order() < 1)
        throw OrderMismatch("jet bracket needs equal orders >= 1");
    const JetSpec& spec = a.spec();
    std::uint32_t k = a.order() - 1;
    std::vector<Expr> xi, phi;
    for (std::size_t i = 0; i < spec.base_dim(); ++i)
        xi.push_back(a.apply(b.xi(i)) - b.apply(a.xi(i)));
    std::map<std::pair<std::size_t, MultiIndex>, Expr> table;
    for (std::uint32_t h = 0; h <= k; ++h) {
        for (std::size_t mu = 0; mu < spec.fiber_dim(); ++mu) {
            for (const auto& j : multi_indices_of_order(spec.base_dim(), h)) {
                Expr c = a.apply(b.coeff(mu, j)) - b.apply(a.coeff(mu, j));
                if (h == 0) phi.push_back(c);
                table[{mu, j}] = std::move(c);
            }
        }
    }
    VectorField base(spec, std::move(xi), std::move(phi));
    return ProlongedField(std::move(base), k, std::move(table));
}

// ---------------------------------------------------------------------------
// Jet-level action of point transformations on section jets

// Transport a section jet through a point transformation jet on the bundle:
// the graph of the section maps forward, the new base map is inverted, and
// the image graph is re-read as a section around the moved base point. The
// map jet mixes base and fiber directions freely; it only needs to keep the
// transformed graph transverse (invertible new base map).
template <class K>
PolyJetT<K> graph_transport(const PolyJetT<K>& map_jet, const PolyJetT<K>& section) {
    std::size_t n = section.source_dim(), m = section.target_dim();
    if (map_jet.source_dim() != n + m || map_jet.target_dim() != n + m)
        throw OrderMismatch("transformation jet must act on base and fiber together");
    if (map_jet.ord != section.ord)
        throw OrderMismatch("jet orders differ in transport");
    if constexpr (!std::is_floating_point_v<K>) {
        std::vector<K> graph_pt = section.source;
        graph_pt.insert(graph_pt.end(), section.target.begin(), section.target.end());
        if (!jet_points_match(map_jet.source, graph_pt))
            throw BasePointMismatch("transformation jet is not based at the section's graph point");
    }

    // Graph map x -> (x, s(x)) as deviation series.
    std::vector<TruncSeries<K>> graph;
    for (std::size_t i = 0; i < n; ++i)
        graph.push_back(TruncSeries<K>::variable(n, section.ord, i));
    for (std::size_t mu = 0; mu < m; ++mu) graph.push_back(section.dev[mu]);

    // New base map beta = pr_base(Phi(x, s(x))) and fiber part along the graph.
    PolyJetT<K> beta;
    beta.source = section.source;
    beta.ord = section.ord;
    std::vector<TruncSeries<K>> fiber_along;
    for (std::size_t i = 0; i < n; ++i) {
        beta.target.push_back(map_jet.target[i]);
        beta.dev.push_back(map_jet.dev[i].compose(graph));
    }
    for (std::size_t mu = 0; mu < m; ++mu)
        fiber_along.push_back(map_jet.dev[n + mu].compose(graph));

    PolyJetT<K> beta_inv = polyjet_invert(beta);

    PolyJetT<K> out;
    out.source = beta.target;
    out.ord = section.ord;
    for (std::size_t mu = 0; mu < m; ++mu) {
        out.target.push_back(map_jet.target[n + mu]);
        out.dev.push_back(fiber_along[mu].compose(beta_inv.dev));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Numeric flow harness

using DoubleJet = PolyJetT<double>;
using DoubleSeries = TruncSeries<double>;

// Taylor-expand a bundle function around a concrete point, to total degree k
// in the combined (base, fiber) deviations.
inline DoubleSeries expr_series_double(const std::map<MultiIndex, Expr>& derivs,
                                       const DoublePoint& at, std::size_t nvars,
                                       std::uint32_t k) {
    DoubleSeries out(nvars, k);
    for (const auto& [j, e] : derivs) {
        double v = eval_double(e, at) / static_cast<double>(j.factorial());
        out.set(j, v);
    }
    return out;
}

// All partial derivatives (in the bundle coordinates) of one component, as
// expressions; evaluated repeatedly while the flow moves the base point.
inline std::map<MultiIndex, Expr> bundle_derivatives(const Expr& f,
                                                     const std::vector<SymbolId>& coords,
                                                     std::uint32_t k) {
    std::map<MultiIndex, Expr> out;
    out[MultiIndex(coords.size())] = f;
    for (const auto& j : multi_indices_up_to(coords.size(), k)) {
        if (j.order() == 0) continue;
        std::size_t i = j.first_nonzero();
        out[j] = diff(out.at(j.minus(i)), coords[i]);
    }
    return out;
}

struct FlowCheckRow {
    std::string coordinate;
    double expected;  // prolongation coefficient at the jet point
    double observed;  // Richardson-extrapolated flow derivative
};

struct FlowCheckReport {
    std::uint32_t order = 0;
    double step = 0.0;
    double tolerance = 0.0;
    double max_error = 0.0;
    bool passed = false;
    std::vector<FlowCheckRow> rows;
};

namespace detail {

// One RK4 integration of the flow's jet along the field, as a map jet based
// at z0. The right-hand side re-expands the field at the moving image point.
inline DoubleJet flow_map_jet(const VectorField& vf,
                              const std::vector<std::map<MultiIndex, Expr>>& derivs,
                              const std::vector<SymbolId>& coords,
                              const std::vector<double>& z0, std::uint32_t k,
                              const DoublePoint& params, double time, int steps) {
    std::size_t dim = coords.size();
    DoubleJet state = DoubleJet::identity(z0, k);
    double h = time / steps;

    struct Deriv {
        std::vector<double> dc;
        std::vector<DoubleSeries> dd;
    };
    auto rhs = [&](const DoubleJet& s) {
        DoublePoint at = params;
        for (std::size_t i = 0; i < dim; ++i) at[coords[i]] = s.target[i];
        Deriv d;
        for (std::size_t c = 0; c < dim; ++c) {
            DoubleSeries series = expr_series_double(derivs[c], at, dim, k);
            d.dc.push_back(series.constant_term());
            series.set(MultiIndex(dim), 0.0);
            DoubleSeries comp = series.compose(s.dev);
            d.dd.push_back(comp);
        }
        return d;
    };
    auto advance = [&](const DoubleJet& s, const Deriv& d, double dt) {
        DoubleJet out = s;
        for (std::size_t c = 0; c < dim; ++c) {
            out.target[c] += dt * d.dc[c];
            out.dev[c] = out.dev[c] + d.dd[c] * dt;
        }
        return out;
    };

    for (int s = 0; s < steps; ++s) {
        Deriv k1 = rhs(state);
        Deriv k2 = rhs(advance(state, k1, h / 2));
        Deriv k3 = rhs(advance(state, k2, h / 2));
        Deriv k4 = rhs(advance(state, k3, h));
        for (std::size_t c = 0; c < dim; ++c) {
            state.target[c] += h / 6 *
                (k1.dc[c] + 2 * k2.dc[c] + 2 * k3.dc[c] + k4.dc[c]);
            state.dev[c] = state.dev[c] +
                (k1.dd[c] + k2.dd[c] * 2.0 + k3.dd[c] * 2.0 + k4.dd[c]) * (h / 6);
        }
    }
    return state;
}

// Jet coordinates (base point, then derivative values) of a section jet.
inline std::vector<double> jet_coordinate_values(const DoubleJet& j) {
    std::vector<double> out = j.source;
    std::size_t n = j.source_dim();
    for (std::uint32_t h = 0; h <= j.ord; ++h)
        for (std::size_t mu = 0; mu < j.target_dim(); ++mu)
            for (const auto& idx : multi_indices_of_order(n, h))
                out.push_back(j.derivative(mu, idx));
    return out;
}

} // namespace detail

// Independent check of the prolongation formula: flow the graph of a section
// numerically, differentiate the flowed jet coordinates at t = 0 (central
// differences plus one Richardson sweep), and compare with the prolonged
// field evaluated at the section's jet.
inline FlowCheckReport flow_check(const VectorField& vf,
                                  const std::vector<Expr>& section,
                                  const std::vector<Rational>& x0, std::uint32_t k,
                                  double step = 1.0 / 64, double tolerance = 1e-6,
                                  const Point& param_values = {}) {
    const JetSpec& spec = vf.spec;
    std::size_t n = spec.base_dim(), m = spec.fiber_dim();
    ProlongedField pr(vf, k);

    PolyJet exact_jet = jet_of_section(section, x0, k, spec, param_values);
    DoubleJet base_jet;
    base_jet.ord = k;
    for (const auto& v : exact_jet.source) base_jet.source.push_back(v.get_d());
    for (const auto& v : exact_jet.target) base_jet.target.push_back(v.get_d());
    for (const auto& s : exact_jet.dev) {
        DoubleSeries ds(n, k);
        for (const auto& [j, c] : s.terms) ds.set(j, c.get_d());
        base_jet.dev.push_back(ds);
    }

    // Bundle coordinates and the field's Taylor tables.
    std::vector<SymbolId> coords;
    for (std::size_t i = 0; i < n; ++i) coords.push_back(spec.x(i));
    for (std::size_t mu = 0; mu < m; ++mu) coords.push_back(spec.u(mu));
    std::vector<std::map<MultiIndex, Expr>> derivs;
    for (std::size_t i = 0; i < n; ++i)
        derivs.push_back(bundle_derivatives(vf.xi[i], coords, k));
    for (std::size_t mu = 0; mu < m; ++mu)
        derivs.push_back(bundle_derivatives(vf.phi[mu], coords, k));

    DoublePoint params;
    for (const auto& [id, v] : param_values) params[id] = v.get_d();
    std::vector<double> z0;
    for (std::size_t i = 0; i < n; ++i) z0.push_back(base_jet.source[i]);
    for (std::size_t mu = 0; mu < m; ++mu) z0.push_back(base_jet.target[mu]);

    auto flowed_coords = [&](double t) {
        int steps = 8;
        DoubleJet map_jet =
            detail::flow_map_jet(vf, derivs, coords, z0, k, params, t, steps);
        DoubleJet moved = graph_transport(map_jet, base_jet);
        return detail::jet_coordinate_values(moved);
    };

    auto central = [&](double t) {
        std::vector<double> plus = flowed_coords(t), minus = flowed_coords(-t);
        std::vector<double> d(plus.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = (plus[i] - minus[i]) / (2 * t);
        return d;
    };
    // Central differences at three step sizes, extrapolated twice: the even
    // error expansion drops the t^2 and t^4 terms, leaving O(t^6).
    std::vector<double> d1 = central(step), d2 = central(step / 2), d4 = central(step / 4);
    std::vector<double> observed(d1.size());
    for (std::size_t i = 0; i < d1.size(); ++i) {
        double r1 = (4 * d2[i] - d1[i]) / 3;
        double r2 = (4 * d4[i] - d2[i]) / 3;
        observed[i] = (16 * r2 - r1) / 15;
    }

    // Expected values: the prolonged coefficients at the jet point.
    DoublePoint at = params;
    for (std::size_t i = 0; i < n; ++i) at[spec.x(i)] = base_jet.source[i];
    for (std::size_t mu = 0; mu < m; ++mu) at[spec.u(mu)] = base_jet.target[mu];
    for (std::uint32_t h = 1; h <= k; ++h)
        for (std::size_t mu = 0; mu < m; ++mu)
            for (const auto& j : multi_indices_of_order(n, h))
                at[spec.jet(mu, j)] = base_jet.derivative(mu, j);

    FlowCheckReport report;
    report.order = k;
    report.step = step;
    report.tolerance = tolerance;
    std::size_t slot = 0;
    auto push = [&](const std::string& name, double expect) {
        FlowCheckRow row{name, expect, observed[slot]};
        double err = std::fabs(row.expected - row.observed);
        if (err > report.max_error) report.max_error = err;
        report.rows.push_back(row);
        ++slot;
    };
    for (std::size_t i = 0; i < n; ++i)
        push(spec.base_names()[i], eval_double(vf.xi[i], at));
    for (std::uint32_t h = 0; h <= k; ++h)
        for (std::size_t mu = 0; mu < m; ++mu)
            for (const auto& j : multi_indices_of_order(n, h))
                push(spec.jet_name(mu, j), eval_double(pr.coeff(mu, j), at));
    report.passed = report.max_error <= tolerance;
    return report;
}

} // namespace jetforge

#endif
