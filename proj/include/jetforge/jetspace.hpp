#ifndef JETFORGE_JETSPACE_HPP
#define JETFORGE_JETSPACE_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jetforge/parser.hpp"
#include "jetforge/polyjet.hpp"

namespace jetforge {

// Coordinate chart for a jet space over a trivial bundle: base variables,
// dependent variables, and derivative coordinates created on demand. With a
// single base variable the derivative of u is written u1, u2, ...; with
// several it is written u[1,0], u[0,2], ... so names stay unambiguous.
class JetSpec {
  public:
    JetSpec(std::vector<std::string> indep, std::vector<std::string> dep)
        : indep_(std::move(indep)), dep_(std::move(dep)) {
        if (indep_.empty() || dep_.empty())
            throw SchemaError("a jet space needs at least one base and one dependent variable");
        for (std::size_t i = 0; i < indep_.size(); ++i)
            xs_.push_back(intern_base(indep_[i], static_cast<std::uint32_t>(i)));
        for (std::size_t mu = 0; mu < dep_.size(); ++mu) {
            MultiIndex zero(indep_.size());
            // Order-0 coordinates are interned with an empty index: their
            // names carry no base dimension, so charts of different arity
            // may share a dependent name.
            SymbolId id = intern_jet(dep_[mu], dep_[mu], MultiIndex(0));
            us_.push_back(id);
            cache_[{mu, zero}] = id;
            owned_[id] = {mu, zero};
        }
    }

    std::size_t base_dim() const { return indep_.size(); }
    std::size_t fiber_dim() const { return dep_.size(); }
    const std::vector<std::string>& base_names() const { return indep_; }
    const std::vector<std::string>& dependent_names() const { return dep_; }

    SymbolId x(std::size_t i) const { return xs_.at(i); }
    SymbolId u(std::size_t mu) const { return us_.at(mu); }

    std::string jet_name(std::size_t mu, const MultiIndex& j) const {
        if (j.order() == 0) return dep_.at(mu);
        if (indep_.size() == 1) return dep_.at(mu) + std::to_string(j[0]);
        return dep_.at(mu) + j.str();
    }

    // Derivative coordinate u^mu_J, interned on first use.
    SymbolId jet(std::size_t mu, const MultiIndex& j) const {
        if (j.size() != indep_.size())
            throw OrderMismatch("multi-index arity does not match the base dimension");
        if (mu >= dep_.size()) throw OrderMismatch("dependent index out of range");
        auto it = cache_.find({mu, j});
        if (it != cache_.end()) return it->second;
        SymbolId id = intern_jet(jet_name(mu, j), dep_[mu], j);
        cache_[{mu, j}] = id;
        owned_[id] = {mu, j};
        return id;
    }

    // If the symbol is a coordinate of this chart, report which one.
    std::optional<std::pair<std::size_t, MultiIndex>> classify(SymbolId id) const {
        auto it = owned_.find(id);
        if (it != owned_.end()) return it->second;
        const SymbolInfo& info = SymbolTable::instance().info(id);
        if (info.kind != SymbolKind::Jet) return std::nullopt;
        MultiIndex j = info.derivs;
        if (j.order() == 0)
            j = MultiIndex(indep_.size());  // dimension-agnostic order-0 coordinate
        else if (j.size() != indep_.size())
            return std::nullopt;
        // The family field names the dependent; names are globally unique,
        // so matching the canonical name settles ownership.
        for (std::size_t mu = 0; mu < dep_.size(); ++mu) {
            if (dep_[mu] != info.family) continue;
            if (info.name != jet_name(mu, j)) return std::nullopt;
            cache_[{mu, j}] = id;
            owned_[id] = {mu, j};
            return owned_[id];
        }
        return std::nullopt;
    }

    std::optional<std::size_t> base_index(SymbolId id) const {
        for (std::size_t i = 0; i < xs_.size(); ++i)
            if (xs_[i] == id) return i;
        return std::nullopt;
    }

    // Coordinates of the order-k jet space, in canonical symbol order.
    std::vector<SymbolId> coordinates(std::uint32_t k) const {
        std::vector<SymbolId> out = xs_;
        for (std::uint32_t h = 0; h <= k; ++h) {
            auto level = fiber_coordinates_of_order(h);
            out.insert(out.end(), level.begin(), level.end());
        }
        return out;
    }

    // Jet coordinates with |J| == h, canonical order (dependent, then index).
    std::vector<SymbolId> fiber_coordinates_of_order(std::uint32_t h) const {
        std::vector<SymbolId> out;
        for (std::size_t mu = 0; mu < dep_.size(); ++mu)
            for (const auto& j : multi_indices_of_order(indep_.size(), h))
                out.push_back(jet(mu, j));
        return out;
    }

    // Jet coordinates with 1 <= |J| <= k appended level by level.
    std::vector<SymbolId> fiber_coordinates(std::uint32_t k) const {
        std::vector<SymbolId> out = us_;
        for (std::uint32_t h = 1; h <= k; ++h) {
            auto level = fiber_coordinates_of_order(h);
            out.insert(out.end(), level.begin(), level.end());
        }
        return out;
    }

    // Names an expression over the order-k jet space may use.
    Vocabulary vocab(std::uint32_t k) const {
        Vocabulary v;
        for (auto id : coordinates(k)) v.add(id);
        return v;
    }

  private:
    std::vector<std::string> indep_, dep_;
    std::vector<SymbolId> xs_, us_;
    mutable std::map<std::pair<std::size_t, MultiIndex>, SymbolId> cache_;
    mutable std::map<SymbolId, std::pair<std::size_t, MultiIndex>> owned_;
};

// Total derivative along x_i: the chain rule through every jet coordinate
// the expression mentions, with u^mu_J feeding u^mu_{J+e_i}. Jet symbols
// from a different chart are rejected rather than silently frozen.
inline Expr total_derivative(const Expr& f, std::size_t i, const JetSpec& spec) {
    if (i >= spec.base_dim()) throw OrderMismatch("base index out of range");
    Expr out = Expr::from_long(0);
    for (SymbolId s : f.symbols()) {
        const SymbolInfo& info = SymbolTable::instance().info(s);
        if (info.kind == SymbolKind::Param) continue;
        if (auto coord = spec.classify(s)) {
            Expr slot = Expr::sym(spec.jet(coord->first, coord->second.plus(i)));
            out = out + slot * diff(f, s);
            continue;
        }
        if (info.kind == SymbolKind::Jet)
            throw InputError("jet symbol '" + info.name + "' belongs to a different chart");
        if (auto bi = spec.base_index(s)) {
            if (*bi == i) out = out + diff(f, s);
            continue;
        }
        // Unrelated base symbols are constants along the fiber; nothing to add.
    }
    return out;
}

inline Expr total_derivative(const Expr& f, const MultiIndex& j, const JetSpec& spec) {
    Expr out = f;
    for (std::size_t i = 0; i < j.size(); ++i)
        for (std::uint32_t r = 0; r < j[i]; ++r) out = total_derivative(out, i, spec);
    return out;
}

// k-jet of a concrete section u = s(x) at a base point. Components must be
// expressions in the base variables (free parameters may appear if bindings
// cover them). Returns the jet as a polynomial map from base to fiber.
inline PolyJet jet_of_section(const std::vector<Expr>& components,
                              const std::vector<Rational>& base_point,
                              std::uint32_t k, const JetSpec& spec,
                              const Point& extra = {}) {
    if (components.size() != spec.fiber_dim())
        throw OrderMismatch("component count does not match the fiber dimension");
    if (base_point.size() != spec.base_dim())
        throw OrderMismatch("base point does not match the base dimension");
    Point at = extra;
    for (std::size_t i = 0; i < spec.base_dim(); ++i) at[spec.x(i)] = base_point[i];
    for (const auto& c : components)
        for (SymbolId s : c.symbols())
            if (SymbolTable::instance().info(s).kind == SymbolKind::Jet)
                throw InputError("a section must be given in base variables only");

    PolyJet out;
    out.source = base_point;
    out.ord = k;
    std::size_t n = spec.base_dim();
    for (std::size_t mu = 0; mu < spec.fiber_dim(); ++mu) {
        std::map<MultiIndex, Expr> derivs;
        derivs[MultiIndex(n)] = components[mu];
        TruncSeries<Rational> dev(n, k);
        for (const auto& j : multi_indices_up_to(n, k)) {
            if (j.order() > 0) {
                std::size_t i = j.first_nonzero();
                derivs[j] = diff(derivs.at(j.minus(i)), spec.x(i));
            }
            Rational v = eval_rational(derivs.at(j), at);
            if (j.order() == 0)
                out.target.push_back(v);
            else
                dev.set(j, v / Rational(static_cast<long>(j.factorial())));
        }
        out.dev.push_back(std::move(dev));
    }
    return out;
}

} // namespace jetforge

#endif
