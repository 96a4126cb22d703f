#ifndef JETFORGE_SYMBOLS_HPP
#define JETFORGE_SYMBOLS_HPP

#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "jetforge/errors.hpp"
#include "jetforge/multiindex.hpp"

namespace jetforge {

// Symbols come in three kinds. Ordering is by kind first (base variables
// before dependent/jet coordinates before free parameters), then by the
// structured indices, never by interning order, so canonical forms do not
// depend on the order in which code happened to create symbols.
enum class SymbolKind : std::uint8_t { Base = 0, Jet = 1, Param = 2 };

using SymbolId = std::uint32_t;

struct SymbolInfo {
    std::string name;
    SymbolKind kind = SymbolKind::Param;
    std::string family;       // jets only: the dependent variable's name
    MultiIndex derivs;        // jets only: the derivative multi-index
    std::uint32_t index = 0;  // position of the base variable

    // Jet identity and order deliberately ignore any chart-local dependent
    // position: two charts may share a dependent name (the same tensor
    // component over the same base), and they must agree on the symbol.
    friend std::strong_ordering operator<=>(const SymbolInfo& a, const SymbolInfo& b) {
        if (auto c = a.kind <=> b.kind; c != 0) return c;
        switch (a.kind) {
            case SymbolKind::Base:
                if (auto c = a.index <=> b.index; c != 0) return c;
                break;
            case SymbolKind::Jet:
                // Order 0 jets (the dependents themselves) come before higher
                // jets; within one order, dependent name then multi-index.
                if (auto c = a.derivs.order() <=> b.derivs.order(); c != 0) return c;
                if (auto c = a.family <=> b.family; c != 0) return c;
                if (auto c = a.derivs <=> b.derivs; c != 0) return c;
                break;
            case SymbolKind::Param:
                break;
        }
        return a.name <=> b.name;
    }
    friend bool operator==(const SymbolInfo& a, const SymbolInfo& b) {
        return (a <=> b) == 0;
    }
};

// Process-wide interning table. Exprs refer to symbols by id; comparisons go
// through the structured key above. Reads take a shared lock so Expr values
// can be used concurrently once built.
class SymbolTable {
  public:
    static SymbolTable& instance() {
        static SymbolTable t;
        return t;
    }

    SymbolId intern(const SymbolInfo& info) {
        std::unique_lock lock(mutex_);
        auto it = by_name_.find(info.name);
        if (it != by_name_.end()) {
            if (!(infos_[it->second] == info))
                throw InputError("symbol '" + info.name +
                                 "' redeclared with a different role");
            return it->second;
        }
        SymbolId id = static_cast<SymbolId>(infos_.size());
        infos_.push_back(info);
        by_name_.emplace(info.name, id);
        return id;
    }

    const SymbolInfo& info(SymbolId id) const {
        std::shared_lock lock(mutex_);
        return infos_[id];
    }

    bool lookup(const std::string& name, SymbolId& out) const {
        std::shared_lock lock(mutex_);
        auto it = by_name_.find(name);
        if (it == by_name_.end()) return false;
        out = it->second;
        return true;
    }

  private:
    SymbolTable() = default;
    mutable std::shared_mutex mutex_;
    std::deque<SymbolInfo> infos_;
    std::map<std::string, SymbolId> by_name_;
};

inline SymbolId intern_base(const std::string& name, std::uint32_t position) {
    SymbolInfo s;
    s.name = name;
    s.kind = SymbolKind::Base;
    s.index = position;
    return SymbolTable::instance().intern(s);
}

inline SymbolId intern_jet(const std::string& name, const std::string& family,
                           const MultiIndex& derivs) {
    SymbolInfo s;
    s.name = name;
    s.kind = SymbolKind::Jet;
    s.family = family;
    s.derivs = derivs;
    return SymbolTable::instance().intern(s);
}

inline SymbolId intern_param(const std::string& name) {
    SymbolInfo s;
    s.name = name;
    s.kind = SymbolKind::Param;
    return SymbolTable::instance().intern(s);
}

inline std::strong_ordering symbol_order(SymbolId a, SymbolId b) {
    if (a == b) return std::strong_ordering::equal;
    return SymbolTable::instance().info(a) <=> SymbolTable::instance().info(b);
}

inline const std::string& symbol_name(SymbolId id) {
    return SymbolTable::instance().info(id).name;
}

} // namespace jetforge

#endif
