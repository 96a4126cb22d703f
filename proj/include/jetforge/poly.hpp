#ifndef JETFORGE_POLY_HPP
#define JETFORGE_POLY_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "jetforge/rational.hpp"
#include "jetforge/symbols.hpp"

namespace jetforge {

// Monomial atoms are either interned symbols or guarded powers. A guarded
// power stands for base^e where the base is a symbol-only polynomial flagged
// positive; the atom carries the base, the exponent lives in the monomial
// with fractional part in (0,1). Integer parts are folded back into plain
// polynomial factors, i.e. we compute in the free module with basis
// 1, g, ..., g^(d-1) over the polynomial ring, where g^d = base.
struct Atom {
    static constexpr std::uint32_t kGuardFlag = 0x80000000u;
    std::uint32_t code = 0;

    static Atom symbol(SymbolId id) { return Atom{id}; }
    static Atom guard(std::uint32_t gid) { return Atom{gid | kGuardFlag}; }
    bool is_guard() const { return (code & kGuardFlag) != 0; }
    SymbolId symbol_id() const { return code; }
    std::uint32_t guard_id() const { return code & ~kGuardFlag; }
    friend bool operator==(Atom a, Atom b) { return a.code == b.code; }
};

struct Factor {
    Atom atom;
    Rational exp; // positive; integer for symbols, in (0,1) for guards
};

struct Monomial {
    std::vector<Factor> factors; // sorted by atom order, exponents nonzero

    bool empty() const { return factors.empty(); }

    Rational degree() const {
        Rational d(0);
        for (const auto& f : factors) d += f.exp;
        return d;
    }

    Rational exponent_of(Atom a) const {
        for (const auto& f : factors)
            if (f.atom == a) return f.exp;
        return Rational(0);
    }

    bool has_guard() const {
        for (const auto& f : factors)
            if (f.atom.is_guard()) return true;
        return false;
    }
};

class Poly;
std::strong_ordering poly_order(const Poly& a, const Poly& b);

// ---------------------------------------------------------------------------
// Guard registry

class GuardTable {
  public:
    static GuardTable& instance() {
        static GuardTable t;
        return t;
    }

    std::uint32_t intern(const Poly& base);
    const Poly& base(std::uint32_t gid) const;

  private:
    GuardTable() = default;
    struct Less {
        bool operator()(const Poly* a, const Poly* b) const {
            return poly_order(*a, *b) < 0;
        }
    };
    mutable std::shared_mutex mutex_;
    std::deque<Poly> bases_;
    std::map<const Poly*, std::uint32_t, Less> ids_;
};

// ---------------------------------------------------------------------------
// Poly

// Sparse polynomial with rational coefficients over symbol and guard atoms.
// Terms are kept sorted ascending in the lexicographic term order, so the
// leading term is terms.back(). The representation is canonical: equal
// polynomials have identical term vectors.
class Poly {
  public:
    using Term = std::pair<Monomial, Rational>;
    std::vector<Term> terms;

    Poly() = default;

    static Poly zero() { return Poly(); }

    static Poly constant(const Rational& c) {
        Poly p;
        if (c != 0) p.terms.push_back({Monomial{}, c});
        return p;
    }

    static Poly one() { return constant(Rational(1)); }

    static Poly symbol(SymbolId id) {
        Poly p;
        Monomial m;
        m.factors.push_back({Atom::symbol(id), Rational(1)});
        p.terms.push_back({std::move(m), Rational(1)});
        return p;
    }

    static Poly monomial(Monomial m, const Rational& c) {
        Poly p;
        if (c != 0) p.terms.push_back({std::move(m), c});
        return p;
    }

    bool is_zero() const { return terms.empty(); }
    bool is_constant() const {
        return terms.empty() || (terms.size() == 1 && terms[0].first.empty());
    }
    Rational constant_value() const {
        return terms.empty() ? Rational(0) : terms[0].second;
    }
    bool is_one() const { return is_constant() && constant_value() == 1; }

    const Term& lead() const { return terms.back(); }

    bool has_guard() const {
        for (const auto& t : terms)
            if (t.first.has_guard()) return true;
        return false;
    }

    // Largest integer exponent of the given atom.
    long degree_in(Atom a) const {
        long d = 0;
        for (const auto& t : terms) {
            Rational e = t.first.exponent_of(a);
            if (e.get_den() == 1) {
                long v = static_cast<long>(e.get_num().get_si());
                if (v > d) d = v;
            }
        }
        return d;
    }

    void collect_symbols(std::vector<SymbolId>& out) const {
        for (const auto& t : terms)
            for (const auto& f : t.first.factors)
                if (!f.atom.is_guard()) out.push_back(f.atom.symbol_id());
    }
};

// ---------------------------------------------------------------------------
// Orders

inline std::strong_ordering atom_order(Atom a, Atom b) {
    if (a == b) return std::strong_ordering::equal;
    bool ga = a.is_guard(), gb = b.is_guard();
    if (ga != gb) return ga ? std::strong_ordering::greater : std::strong_ordering::less;
    if (!ga) return symbol_order(a.symbol_id(), b.symbol_id());
    const Poly& pa = GuardTable::instance().base(a.guard_id());
    const Poly& pb = GuardTable::instance().base(b.guard_id());
    return poly_order(pa, pb);
}

inline std::strong_ordering rational_order(const Rational& a, const Rational& b) {
    int c = cmp(a, b);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

// Lexicographic term order: walk the factor lists in atom order; the first
// atom where the exponents differ decides (missing atom counts as zero).
inline std::strong_ordering monomial_order(const Monomial& a, const Monomial& b) {
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() || j < b.factors.size()) {
        if (i == a.factors.size()) return std::strong_ordering::less;
        if (j == b.factors.size()) return std::strong_ordering::greater;
        auto c = atom_order(a.factors[i].atom, b.factors[j].atom);
        if (c == std::strong_ordering::less) {
            // a has a factor in an earlier atom; its exponent > 0 beats b's 0.
            return std::strong_ordering::greater;
        }
        if (c == std::strong_ordering::greater) return std::strong_ordering::less;
        if (auto e = rational_order(a.factors[i].exp, b.factors[j].exp); e != 0) return e;
        ++i;
        ++j;
    }
    return std::strong_ordering::equal;
}

inline bool monomial_equal(const Monomial& a, const Monomial& b) {
    return monomial_order(a, b) == 0;
}

inline std::strong_ordering poly_order(const Poly& a, const Poly& b) {
    std::size_t n = std::min(a.terms.size(), b.terms.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (auto c = monomial_order(a.terms[i].first, b.terms[i].first); c != 0) return c;
        if (auto c = rational_order(a.terms[i].second, b.terms[i].second); c != 0) return c;
    }
    return a.terms.size() <=> b.terms.size();
}

inline bool poly_equal(const Poly& a, const Poly& b) { return poly_order(a, b) == 0; }

// ---------------------------------------------------------------------------
// Guard registry implementation (needs poly_order)

inline std::uint32_t GuardTable::intern(const Poly& base) {
    std::unique_lock lock(mutex_);
    auto it = ids_.find(&base);
    if (it != ids_.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(bases_.size());
    bases_.push_back(base);
    ids_.emplace(&bases_.back(), id);
    return id;
}

inline const Poly& GuardTable::base(std::uint32_t gid) const {
    std::shared_lock lock(mutex_);
    return bases_[gid];
}

inline const Poly& guard_base(Atom a) {
    return GuardTable::instance().base(a.guard_id());
}

// ---------------------------------------------------------------------------
// Arithmetic

inline void poly_sort_merge(std::vector<Poly::Term>& terms) {
    std::sort(terms.begin(), terms.end(), [](const Poly::Term& x, const Poly::Term& y) {
        return monomial_order(x.first, y.first) < 0;
    });
    std::vector<Poly::Term> merged;
    merged.reserve(terms.size());
    for (auto& t : terms) {
        if (!merged.empty() && monomial_equal(merged.back().first, t.first)) {
            merged.back().second += t.second;
            if (merged.back().second == 0) merged.pop_back();
        } else if (t.second != 0) {
            merged.push_back(std::move(t));
        }
    }
    terms = std::move(merged);
}

inline Poly operator+(const Poly& a, const Poly& b) {
    std::vector<Poly::Term> terms;
    terms.reserve(a.terms.size() + b.terms.size());
    // Merge two sorted term lists.
    std::size_t i = 0, j = 0;
    while (i < a.terms.size() || j < b.terms.size()) {
        if (i == a.terms.size()) {
            terms.push_back(b.terms[j++]);
            continue;
        }
        if (j == b.terms.size()) {
            terms.push_back(a.terms[i++]);
            continue;
        }
        auto c = monomial_order(a.terms[i].first, b.terms[j].first);
        if (c < 0) {
            terms.push_back(a.terms[i++]);
        } else if (c > 0) {
            terms.push_back(b.terms[j++]);
        } else {
            Rational s = a.terms[i].second + b.terms[j].second;
            if (s != 0) terms.push_back({a.terms[i].first, s});
            ++i;
            ++j;
        }
    }
    Poly out;
    out.terms = std::move(terms);
    return out;
}

inline Poly operator-(const Poly& a) {
    Poly out = a;
    for (auto& t : out.terms) t.second = -t.second;
    return out;
}

inline Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b);

// Product of two monomials. Guard exponents whose sum reaches 1 fold an
// extra copy of the base into the polynomial multiplier.
inline std::pair<Monomial, Poly> monomial_mul(const Monomial& a, const Monomial& b) {
    Monomial out;
    Poly mult = Poly::one();
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() || j < b.factors.size()) {
        const Factor* take = nullptr;
        if (i == a.factors.size()) {
            take = &b.factors[j++];
        } else if (j == b.factors.size()) {
            take = &a.factors[i++];
        } else {
            auto c = atom_order(a.factors[i].atom, b.factors[j].atom);
            if (c < 0) {
                take = &a.factors[i++];
            } else if (c > 0) {
                take = &b.factors[j++];
            } else {
                Factor f = a.factors[i];
                f.exp += b.factors[j].exp;
                ++i;
                ++j;
                if (f.atom.is_guard() && f.exp >= 1) {
                    mult = mult * guard_base(f.atom);
                    f.exp -= 1;
                }
                if (f.exp != 0) out.factors.push_back(std::move(f));
                continue;
            }
        }
        out.factors.push_back(*take);
    }
    return {std::move(out), std::move(mult)};
}

inline Poly operator*(const Poly& a, const Poly& b) {
    std::vector<Poly::Term> plain;
    Poly folded = Poly::zero();
    for (const auto& ta : a.terms) {
        for (const auto& tb : b.terms) {
            auto [mon, mult] = monomial_mul(ta.first, tb.first);
            Rational c = ta.second * tb.second;
            if (mult.is_one()) {
                plain.push_back({std::move(mon), std::move(c)});
            } else {
                // Rare path: guard exponents folded; mult is guard-free so
                // this recursion terminates.
                folded = folded + Poly::monomial(mon, c) * mult;
            }
        }
    }
    poly_sort_merge(plain);
    Poly out;
    out.terms = std::move(plain);
    return out + folded;
}

inline Poly operator*(const Poly& a, const Rational& c) {
    if (c == 0) return Poly::zero();
    Poly out = a;
    for (auto& t : out.terms) t.second *= c;
    return out;
}

inline Poly poly_pow(const Poly& a, unsigned long e) {
    Poly out = Poly::one();
    Poly base = a;
    while (e > 0) {
        if (e & 1) out = out * base;
        base = base * base;
        e >>= 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Content and primitive parts

inline Rational rational_gcd(const Rational& a, const Rational& b) {
    Integer num_gcd, den_lcm;
    mpz_gcd(num_gcd.get_mpz_t(), a.get_num_mpz_t(), b.get_num_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), a.get_den_mpz_t(), b.get_den_mpz_t());
    Rational r(num_gcd, den_lcm);
    r.canonicalize();
    return r;
}

// Positive rational c such that p/c has coprime integer coefficients.
inline Rational poly_content(const Poly& p) {
    Rational c(0);
    for (const auto& t : p.terms) {
        c = rational_gcd(c, abs(t.second));
        if (c == 1) break;
    }
    return c;
}

// Divides out the rational content and fixes the leading coefficient sign to
// be positive. Zero stays zero.
inline Poly poly_primitive_positive(const Poly& p) {
    if (p.is_zero()) return p;
    Rational c = poly_content(p);
    if (sgn(p.lead().second) < 0) c = -c;
    Poly out = p;
    for (auto& t : out.terms) t.second /= c;
    return out;
}

// ---------------------------------------------------------------------------
// Exact division (used with known-divisible inputs)

inline bool monomial_divide(const Monomial& num, const Monomial& den, Monomial& out) {
    out.factors.clear();
    std::size_t i = 0, j = 0;
    while (i < num.factors.size() || j < den.factors.size()) {
        if (j == den.factors.size()) {
            out.factors.push_back(num.factors[i++]);
            continue;
        }
        if (i == num.factors.size()) return false;
        auto c = atom_order(num.factors[i].atom, den.factors[j].atom);
        if (c < 0) {
            out.factors.push_back(num.factors[i++]);
        } else if (c > 0) {
            return false;
        } else {
            Rational e = num.factors[i].exp - den.factors[j].exp;
            if (sgn(e) < 0) return false;
            if (e != 0) out.factors.push_back({num.factors[i].atom, e});
            ++i;
            ++j;
        }
    }
    return true;
}

// Exact quotient a/b; throws if b does not divide a. b must be guard-free.
inline Poly poly_divexact(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw DivisionByZero("polynomial division by zero");
    if (b.is_one()) return a;
    Poly rem = a;
    std::vector<Poly::Term> quot;
    while (!rem.is_zero()) {
        Monomial qm;
        if (!monomial_divide(rem.lead().first, b.lead().first, qm))
            throw Error("inexact polynomial division");
        Rational qc = rem.lead().second / b.lead().second;
        quot.push_back({qm, qc});
        rem = rem - b * Poly::monomial(qm, qc);
    }
    poly_sort_merge(quot);
    Poly out;
    out.terms = std::move(quot);
    return out;
}

// ---------------------------------------------------------------------------
// Multivariate gcd (guard-free inputs) via primitive subresultant PRS

namespace detail {

// Dense univariate view in one atom: coefficient polys by degree.
inline std::vector<Poly> univariate_view(const Poly& p, Atom v) {
    std::vector<Poly> coeffs(static_cast<std::size_t>(p.degree_in(v)) + 1, Poly::zero());
    for (const auto& t : p.terms) {
        Rational e = t.first.exponent_of(v);
        auto deg = static_cast<std::size_t>(e.get_num().get_si());
        Monomial rest;
        for (const auto& f : t.first.factors)
            if (!(f.atom == v)) rest.factors.push_back(f);
        coeffs[deg] = coeffs[deg] + Poly::monomial(rest, t.second);
    }
    return coeffs;
}

inline Poly from_univariate(const std::vector<Poly>& coeffs, Atom v) {
    Poly out = Poly::zero();
    Poly vpow = Poly::one();
    Poly vp = Poly::symbol(v.symbol_id());
    for (std::size_t d = 0; d < coeffs.size(); ++d) {
        if (d > 0) vpow = vpow * vp;
        out = out + coeffs[d] * vpow;
    }
    return out;
}

inline std::size_t uni_degree(const std::vector<Poly>& f) {
    std::size_t d = f.size();
    while (d > 0 && f[d - 1].is_zero()) --d;
    return d == 0 ? 0 : d - 1;
}

inline bool uni_is_zero(const std::vector<Poly>& f) {
    for (const auto& c : f)
        if (!c.is_zero()) return false;
    return true;
}

// Exact pseudo-remainder lc(g)^(deg f - deg g + 1) * f mod g (univariate
// with Poly coefficients). The full power is required: the subresultant
// divisions downstream assume it even when a step drops the degree by more
// than one.
inline std::vector<Poly> pseudo_rem(std::vector<Poly> f, const std::vector<Poly>& g) {
    std::size_t df = uni_degree(f), dg = uni_degree(g);
    if (uni_is_zero(f) || df < dg) return f;
    const Poly& lg = g[dg];
    std::size_t need = df - dg + 1, used = 0;
    while (!uni_is_zero(f) && (df = uni_degree(f)) >= dg && !f[df].is_zero()) {
        Poly lf = f[df];
        // f = lg*f - lf*g*v^(df-dg)
        for (auto& c : f) c = c * lg;
        ++used;
        for (std::size_t i = 0; i <= dg; ++i)
            f[df - dg + i] = f[df - dg + i] - lf * g[i];
        if (!f[df].is_zero()) throw Error("pseudo-division failed to cancel");
        if (uni_is_zero(f)) break;
    }
    if (used < need && !uni_is_zero(f)) {
        Poly extra = poly_pow(lg, need - used);
        for (auto& c : f)
            if (!c.is_zero()) c = c * extra;
    }
    return f;
}

} // namespace detail

Poly poly_gcd(const Poly& a, const Poly& b);

inline Poly poly_gcd_list(const std::vector<Poly>& ps) {
    Poly g = Poly::zero();
    for (const auto& p : ps) {
        g = poly_gcd(g, p);
        if (g.is_one()) break;
    }
    return g;
}

inline Poly poly_gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return poly_primitive_positive(b);
    if (b.is_zero()) return poly_primitive_positive(a);
    Poly pa = poly_primitive_positive(a);
    Poly pb = poly_primitive_positive(b);
    if (pa.is_constant() || pb.is_constant()) return Poly::one();

    // Pick the largest atom present as the main variable.
    Atom v = pa.lead().first.factors.back().atom;
    if (atom_order(pb.lead().first.factors.back().atom, v) > 0)
        v = pb.lead().first.factors.back().atom;
    if (v.is_guard()) throw Error("gcd over guarded atoms is not defined");

    auto fa = detail::univariate_view(pa, v);
    auto fb = detail::univariate_view(pb, v);
    Poly cont_a = poly_gcd_list(fa);
    Poly cont_b = poly_gcd_list(fb);
    Poly cont = poly_gcd(cont_a, cont_b);
    for (auto& c : fa) c = c.is_zero() ? c : poly_divexact(c, cont_a);
    for (auto& c : fb) c = c.is_zero() ? c : poly_divexact(c, cont_b);

    // Subresultant polynomial remainder sequence on the primitive parts.
    if (detail::uni_degree(fa) < detail::uni_degree(fb)) std::swap(fa, fb);
    Poly g = Poly::one(), h = Poly::one();
    for (;;) {
        std::size_t df = detail::uni_degree(fa), dg = detail::uni_degree(fb);
        std::size_t delta = df - dg;
        auto r = detail::pseudo_rem(fa, fb);
        if (detail::uni_is_zero(r)) break;
        if (detail::uni_degree(r) == 0) {
            // Coprime in v; the gcd is the shared content only.
            return poly_primitive_positive(cont);
        }
        fa = std::move(fb);
        fb = std::move(r);
        Poly divisor = g * poly_pow(h, delta);
        for (auto& c : fb) c = c.is_zero() ? c : poly_divexact(c, divisor);
        g = fa[detail::uni_degree(fa)];
        if (delta >= 1) {
            Poly gp = poly_pow(g, delta);
            h = (delta == 1) ? gp : poly_divexact(gp, poly_pow(h, delta - 1));
        }
    }
    // Primitive part of fb in v times the shared content.
    Poly cont_r = poly_gcd_list(fb);
    for (auto& c : fb) c = c.is_zero() ? c : poly_divexact(c, cont_r);
    Poly result = detail::from_univariate(fb, v) * cont;
    return poly_primitive_positive(result);
}

// ---------------------------------------------------------------------------
// Exact polynomial d-th root (fails with nullopt when none exists)

inline std::optional<Poly> poly_root(const Poly& p, unsigned long d) {
    if (d == 0) return std::nullopt;
    if (d == 1) return p;
    if (p.is_zero()) return Poly::zero();
    if (p.has_guard()) return std::nullopt;
    // Root of the leading term.
    const auto& [lm, lc] = p.lead();
    auto croot = rational_root(lc, d);
    if (!croot) return std::nullopt;
    Monomial mroot;
    for (const auto& f : lm.factors) {
        Rational e = f.exp / Rational(static_cast<long>(d));
        if (e.get_den() != 1) return std::nullopt;
        mroot.factors.push_back({f.atom, e});
    }
    Poly r = Poly::monomial(mroot, *croot);
    // Add lower terms greedily: each step the next term is
    // lead(p - r^d) / (d * lead(r)^(d-1)).
    Poly lead_den = Poly::monomial(mroot, *croot * Rational(static_cast<long>(d)));
    lead_den = poly_pow(Poly::monomial(mroot, *croot), d - 1) * Rational(static_cast<long>(d));
    for (std::size_t guard_iter = 0; guard_iter < 4096; ++guard_iter) {
        Poly rem = p - poly_pow(r, d);
        if (rem.is_zero()) {
            if (d % 2 == 0) {
                // Even roots of positive-definite bases must be positive at
                // the origin; reject candidates that are not.
                Rational c0(0);
                if (!r.terms.empty() && r.terms.front().first.empty())
                    c0 = r.terms.front().second;
                if (sgn(c0) <= 0) return std::nullopt;
            }
            return r;
        }
        Monomial qm;
        if (!monomial_divide(rem.lead().first, lead_den.lead().first, qm))
            return std::nullopt;
        Rational qc = rem.lead().second / lead_den.lead().second;
        r = r + Poly::monomial(qm, qc);
    }
    return std::nullopt;
}

} // namespace jetforge

#endif
