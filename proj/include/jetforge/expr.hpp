#ifndef JETFORGE_EXPR_HPP
#define JETFORGE_EXPR_HPP

#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "jetforge/poly.hpp"

namespace jetforge {

class Expr;
Expr expr_rationalize(const Poly& num, const Poly& den);

// Exact symbolic value: a canonical quotient num/den of sparse polynomials.
// Invariants: den is guard-free, has coprime integer coefficients and a
// positive leading coefficient; gcd(num, den) = 1 (guard atoms treated as
// module basis elements); zero is 0/1. Equal values always have identical
// representations, so operator== is structural.
class Expr {
  public:
    Expr() : num_(Poly::zero()), den_(Poly::one()) {}
    explicit Expr(long v) : num_(Poly::constant(Rational(v))), den_(Poly::one()) {}

    static Expr from_rational(const Rational& c) {
        Expr e;
        e.num_ = Poly::constant(c);
        return e;
    }
    static Expr from_long(long c) { return from_rational(Rational(c)); }
    static Expr sym(SymbolId id) {
        Expr e;
        e.num_ = Poly::symbol(id);
        return e;
    }
    static Expr from_poly(const Poly& p) { return make(p, Poly::one()); }
    static Expr make(Poly num, Poly den);

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_one(); }
    bool has_guard() const { return num_.has_guard(); }

    Rational as_rational() const {
        if (!is_constant()) throw DomainError("expression is not a constant");
        return num_.constant_value();
    }

    friend bool operator==(const Expr& a, const Expr& b) {
        return poly_equal(a.num_, b.num_) && poly_equal(a.den_, b.den_);
    }

    friend Expr operator+(const Expr& a, const Expr& b) {
        return make(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Expr operator-(const Expr& a) { return make(-a.num_, a.den_); }
    friend Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
    friend Expr operator*(const Expr& a, const Expr& b) {
        return make(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Expr operator/(const Expr& a, const Expr& b) {
        if (b.is_zero()) throw DivisionByZero();
        return make(a.num_ * b.den_, a.den_ * b.num_);
    }

    void collect_symbols(std::vector<SymbolId>& out) const {
        num_.collect_symbols(out);
        den_.collect_symbols(out);
        for (const auto& t : num_.terms)
            for (const auto& f : t.first.factors)
                if (f.atom.is_guard()) guard_base(f.atom).collect_symbols(out);
    }

    std::vector<SymbolId> symbols() const {
        std::vector<SymbolId> out;
        collect_symbols(out);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    bool depends_on(SymbolId s) const {
        auto syms = symbols();
        return std::find(syms.begin(), syms.end(), s) != syms.end();
    }

  private:
    Poly num_, den_;
};

// Values are canonical on construction; normalize is the identity and exists
// so callers can state intent.
inline Expr normalize(const Expr& e) { return e; }

// ---------------------------------------------------------------------------
// Canonicalization

inline Expr Expr::make(Poly num, Poly den) {
    if (den.is_zero()) throw DivisionByZero();
    if (den.has_guard()) return expr_rationalize(num, den);
    Expr out;
    if (num.is_zero()) return out;

    if (!den.is_one()) {
        // gcd over the guard-class coefficients of num and den.
        std::vector<Poly> classes;
        {
            // Group numerator terms by their guard part.
            std::vector<std::pair<Monomial, Poly>> split;
            for (const auto& t : num.terms) {
                Monomial guards, plain;
                for (const auto& f : t.first.factors)
                    (f.atom.is_guard() ? guards : plain).factors.push_back(f);
                bool found = false;
                for (auto& [g, p] : split)
                    if (monomial_equal(g, guards)) {
                        p = p + Poly::monomial(plain, t.second);
                        found = true;
                        break;
                    }
                if (!found) split.push_back({guards, Poly::monomial(plain, t.second)});
            }
            for (auto& [g, p] : split) classes.push_back(p);
            Poly g = poly_gcd(poly_gcd_list(classes), den);
            if (!g.is_one()) {
                den = poly_divexact(den, g);
                Poly reduced = Poly::zero();
                for (auto& [gm, p] : split) {
                    Poly q = poly_divexact(p, g);
                    reduced = reduced + q * Poly::monomial(gm, Rational(1));
                }
                num = std::move(reduced);
            }
        }
    }

    // Scale so den has coprime integer coefficients and positive lead.
    Rational scale = poly_content(den);
    if (sgn(den.lead().second) < 0) scale = -scale;
    if (scale != 1) {
        for (auto& t : den.terms) t.second /= scale;
        for (auto& t : num.terms) t.second /= scale;
    }
    out.num_ = std::move(num);
    out.den_ = std::move(den);
    return out;
}

// ---------------------------------------------------------------------------
// Guarded powers

// Syntactic positivity: every coefficient positive, every exponent an even
// integer, and a positive constant term. Sufficient for pointwise positivity
// over the reals, which is what fractional powers require.
inline bool poly_positive_flagged(const Poly& p) {
    if (p.is_zero()) return false;
    bool has_const = false;
    for (const auto& t : p.terms) {
        if (sgn(t.second) <= 0) return false;
        if (t.first.empty()) {
            has_const = true;
            continue;
        }
        for (const auto& f : t.first.factors) {
            if (f.atom.is_guard()) return false;
            if (f.exp.get_den() != 1) return false;
            if (mpz_odd_p(f.exp.get_num_mpz_t())) return false;
        }
    }
    return has_const;
}

Expr expr_ipow(const Expr& a, long e);

// base^(p/q) for a polynomial base. trusted skips the syntactic positivity
// check (used internally when positivity is inherited from the inputs).
inline Expr guarded_poly_pow(const Poly& base, long p, unsigned long q, bool trusted) {
    if (base.is_zero()) {
        if (p <= 0) throw DivisionByZero();
        return Expr();
    }
    if (q == 1) return expr_ipow(Expr::from_poly(base), p);
    if (base.has_guard())
        throw DomainError("nested guarded powers are not supported");
    if (base.is_constant()) {
        Rational c = base.constant_value();
        if (sgn(c) < 0) throw NegativeBaseFractionalPower();
        try {
            return Expr::from_rational(pow_rational_exact(c, p, static_cast<long>(q)));
        } catch (const IrrationalValue&) {
            // Falls through to a constant guard atom below.
        }
    } else if (!trusted && !poly_positive_flagged(base)) {
        throw NegativeBaseFractionalPower();
    }

    // Unwrap perfect d-th powers for divisors d of q.
    for (unsigned long d = q; d >= 2; --d) {
        if (q % d != 0) continue;
        if (auto r = poly_root(base, d)) {
            Rational e(p * static_cast<long>(d), static_cast<long>(q));
            e.canonicalize();
            return guarded_poly_pow(*r, static_cast<long>(e.get_num().get_si()),
                                    e.get_den().get_ui(), true);
        }
    }

    // Pull out a rational content factor when its exact q-th root exists.
    Poly b = base;
    Expr factor = Expr::from_rational(Rational(1));
    Rational content = poly_content(b);
    if (content != 1 && !b.is_constant()) {
        if (auto rc = rational_root(content, q)) {
            factor = Expr::from_rational(pow_rational(*rc, p));
            for (auto& t : b.terms) t.second /= content;
        }
    }

    std::uint32_t gid = GuardTable::instance().intern(b);
    Rational e(p, static_cast<long>(q));
    e.canonicalize();
    // Split e into integer and fractional parts, fractional in (0,1).
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), e.get_num_mpz_t(), e.get_den_mpz_t());
    Rational frac = e - Rational(fl);
    Expr out = Expr::from_rational(Rational(1));
    long fli = static_cast<long>(fl.get_si());
    if (fli > 0) out = Expr::from_poly(poly_pow(b, static_cast<unsigned long>(fli)));
    if (fli < 0) out = Expr::make(Poly::one(), poly_pow(b, static_cast<unsigned long>(-fli)));
    if (frac != 0) {
        Monomial m;
        m.factors.push_back({Atom::guard(gid), frac});
        out = out * Expr::from_poly(Poly::monomial(m, Rational(1)));
    }
    return out * factor;
}

inline Expr expr_ipow(const Expr& a, long e) {
    if (e == 0) return Expr::from_long(1);
    bool inv = e < 0;
    unsigned long mag = static_cast<unsigned long>(inv ? -e : e);
    if (inv && a.is_zero()) throw DivisionByZero();
    Poly n = poly_pow(a.num(), mag);
    Poly d = poly_pow(a.den(), mag);
    return inv ? Expr::make(std::move(d), std::move(n))
               : Expr::make(std::move(n), std::move(d));
}

// General power with rational exponent.
inline Expr expr_pow(const Expr& a, const Rational& e, bool trusted = false) {
    if (e.get_den() == 1) return expr_ipow(a, static_cast<long>(e.get_num().get_si()));
    if (a.is_zero()) {
        if (sgn(e) <= 0) throw DivisionByZero();
        return Expr();
    }
    long p = static_cast<long>(e.get_num().get_si());
    unsigned long q = e.get_den().get_ui();
    if (a.den().is_one())
        return guarded_poly_pow(a.num(), p, q, trusted);
    // (num/den)^e = (num*den)^e / (den^2)^e keeps both bases pointwise
    // positive whenever the quotient is.
    Expr top = guarded_poly_pow(a.num() * a.den(), p, q, trusted);
    Expr bot = guarded_poly_pow(a.den() * a.den(), p, q, trusted);
    return top / bot;
}

// ---------------------------------------------------------------------------
// Rationalizing guarded denominators

namespace detail {

inline std::size_t expr_uni_degree(const std::vector<Expr>& f) {
    std::size_t d = f.size();
    while (d > 0 && f[d - 1].is_zero()) --d;
    return d == 0 ? 0 : d - 1;
}

inline bool expr_uni_is_zero(const std::vector<Expr>& f) {
    for (const auto& c : f)
        if (!c.is_zero()) return false;
    return true;
}

// Field division with remainder for univariate polynomials with Expr
// coefficients.
inline void expr_uni_divmod(const std::vector<Expr>& a, const std::vector<Expr>& b,
                            std::vector<Expr>& quot, std::vector<Expr>& rem) {
    std::size_t db = expr_uni_degree(b);
    rem = a;
    quot.assign(a.size(), Expr());
    while (!expr_uni_is_zero(rem)) {
        std::size_t dr = expr_uni_degree(rem);
        if (dr < db) break;
        Expr q = rem[dr] / b[db];
        quot[dr - db] = quot[dr - db] + q;
        for (std::size_t i = 0; i <= db; ++i)
            rem[dr - db + i] = rem[dr - db + i] - q * b[i];
        rem[dr] = Expr();
    }
}

} // namespace detail

inline Expr expr_rationalize(const Poly& num, const Poly& den) {
    // Pick the smallest guard atom in the denominator.
    Atom g{0};
    bool found = false;
    for (const auto& t : den.terms)
        for (const auto& f : t.first.factors)
            if (f.atom.is_guard() && (!found || atom_order(f.atom, g) < 0)) {
                g = f.atom;
                found = true;
            }
    if (!found) throw Error("expr_rationalize called without guards");
    const Poly base = guard_base(g);

    // Fast path: denominator is a single term c*m*g^f; then 1/den =
    // g^(1-f) / (c*m*base).
    if (den.terms.size() == 1) {
        const auto& [m, c] = den.terms[0];
        Monomial sym_part, inv_guards;
        Poly extra = Poly::one();
        for (const auto& f : m.factors) {
            if (!f.atom.is_guard()) {
                sym_part.factors.push_back(f);
            } else {
                Rational up = Rational(1) - f.exp;
                if (up != 0) inv_guards.factors.push_back({f.atom, up});
                extra = extra * guard_base(f.atom);
            }
        }
        if (inv_guards.empty() && poly_equal(extra, Poly::one()))
            throw Error("single-term denominator had no guard");
        Poly new_num = num * Poly::monomial(inv_guards, Rational(1));
        Poly new_den = Poly::monomial(sym_part, c) * extra;
        return Expr::make(std::move(new_num), std::move(new_den));
    }

    // General path: write den as a polynomial in h = base^(1/D) and invert it
    // modulo h^D - base by the extended Euclidean algorithm over the field of
    // guard-free (in g) expressions.
    unsigned long D = 1;
    for (const auto& t : den.terms) {
        Rational e = t.first.exponent_of(g);
        D = std::lcm(D, e.get_den().get_ui());
    }
    std::vector<Expr> den_h(D, Expr());
    for (const auto& t : den.terms) {
        Rational e = t.first.exponent_of(g);
        Rational kq = e * Rational(static_cast<long>(D));
        auto k = static_cast<std::size_t>(kq.get_num().get_si());
        Monomial rest;
        for (const auto& f : t.first.factors)
            if (!(f.atom == g)) rest.factors.push_back(f);
        den_h[k] = den_h[k] + Expr::from_poly(Poly::monomial(rest, t.second));
    }
    std::vector<Expr> modulus(D + 1, Expr());
    modulus[0] = -Expr::from_poly(base);
    modulus[D] = Expr::from_long(1);

    // Extended Euclid tracking the cofactor of den_h.
    std::vector<Expr> r0 = modulus, r1 = den_h;
    std::vector<Expr> t0(1, Expr()), t1(1, Expr::from_long(1));
    while (!(detail::expr_uni_is_zero(r1) || detail::expr_uni_degree(r1) == 0)) {
        std::vector<Expr> q, r;
        detail::expr_uni_divmod(r0, r1, q, r);
        // t_new = t0 - q*t1
        std::vector<Expr> tn(std::max(t0.size(), q.size() + t1.size()), Expr());
        for (std::size_t i = 0; i < t0.size(); ++i) tn[i] = t0[i];
        for (std::size_t i = 0; i < q.size(); ++i)
            for (std::size_t j = 0; j < t1.size(); ++j)
                tn[i + j] = tn[i + j] - q[i] * t1[j];
        r0 = std::move(r1);
        r1 = std::move(r);
        t0 = std::move(t1);
        t1 = std::move(tn);
    }
    if (detail::expr_uni_is_zero(r1))
        throw DomainError("guarded denominator is a zero divisor");
    Expr c = r1[0];

    // 1/den = t1(h)/c with h^k mapped back to base^(k/D).
    Expr inv = Expr();
    for (std::size_t k = 0; k < t1.size(); ++k) {
        if (t1[k].is_zero()) continue;
        Expr hk = guarded_poly_pow(base, static_cast<long>(k),
                                   D, true);
        inv = inv + t1[k] * hk;
    }
    return Expr::from_poly(num) * inv / c;
}

// ---------------------------------------------------------------------------
// Differentiation

// d/ds of a guard-free polynomial.
inline Poly poly_diff_plain(const Poly& p, SymbolId s) {
    Poly out = Poly::zero();
    Atom sa = Atom::symbol(s);
    for (const auto& t : p.terms) {
        for (std::size_t i = 0; i < t.first.factors.size(); ++i) {
            const Factor& f = t.first.factors[i];
            if (!(f.atom == sa)) continue;
            Monomial m = t.first;
            Rational e = f.exp;
            if (e == 1)
                m.factors.erase(m.factors.begin() + static_cast<long>(i));
            else
                m.factors[i].exp -= 1;
            out = out + Poly::monomial(m, t.second * e);
        }
    }
    return out;
}

inline Expr poly_diff(const Poly& p, SymbolId s) {
    Expr out;
    Atom sa = Atom::symbol(s);
    for (const auto& t : p.terms) {
        for (std::size_t i = 0; i < t.first.factors.size(); ++i) {
            const Factor& f = t.first.factors[i];
            if (f.atom.is_guard()) {
                const Poly& base = guard_base(f.atom);
                Poly dbase = poly_diff_plain(base, s);
                if (dbase.is_zero()) continue;
                // d(g^e) = e*g^e*dbase/base
                Expr piece = Expr::from_poly(Poly::monomial(t.first, t.second * f.exp));
                out = out + piece * Expr::make(dbase, base);
            } else if (f.atom == sa) {
                Monomial m = t.first;
                Rational e = f.exp;
                if (e == 1)
                    m.factors.erase(m.factors.begin() + static_cast<long>(i));
                else
                    m.factors[i].exp -= 1;
                out = out + Expr::from_poly(Poly::monomial(m, t.second * e));
            }
        }
    }
    return out;
}

inline Expr diff(const Expr& e, SymbolId s) {
    Expr dn = poly_diff(e.num(), s);
    Expr dd = poly_diff(e.den(), s);
    Expr den = Expr::from_poly(e.den());
    if (dd.is_zero()) return dn / den;
    Expr num = Expr::from_poly(e.num());
    return (dn * den - num * dd) / (den * den);
}

// ---------------------------------------------------------------------------
// Substitution and evaluation

using Bindings = std::map<SymbolId, Expr>;
using Point = std::map<SymbolId, Rational>;

inline Expr poly_subs(const Poly& p, const Bindings& bind) {
    Expr out;
    for (const auto& t : p.terms) {
        Expr term = Expr::from_rational(t.second);
        for (const auto& f : t.first.factors) {
            if (f.atom.is_guard()) {
                const Poly& base = guard_base(f.atom);
                Expr nb = poly_subs(base, bind);
                term = term * expr_pow(nb, f.exp, true);
            } else {
                auto it = bind.find(f.atom.symbol_id());
                Expr value = (it == bind.end()) ? Expr::sym(f.atom.symbol_id()) : it->second;
                term = term * expr_ipow(value, static_cast<long>(f.exp.get_num().get_si()));
            }
        }
        out = out + term;
    }
    return out;
}

// Simultaneous substitution.
inline Expr subs(const Expr& e, const Bindings& bind) {
    Expr n = poly_subs(e.num(), bind);
    Expr d = poly_subs(e.den(), bind);
    if (d.is_zero()) throw DivisionByZero("substitution produced a zero denominator");
    return n / d;
}

inline Rational poly_eval(const Poly& p, const Point& point) {
    Rational out(0);
    for (const auto& t : p.terms) {
        Rational term = t.second;
        for (const auto& f : t.first.factors) {
            if (f.atom.is_guard()) {
                Rational base = poly_eval(guard_base(f.atom), point);
                term *= pow_rational_exact(base,
                                           static_cast<long>(f.exp.get_num().get_si()),
                                           static_cast<long>(f.exp.get_den().get_si()));
            } else {
                auto it = point.find(f.atom.symbol_id());
                if (it == point.end())
                    throw UnknownSymbol(symbol_name(f.atom.symbol_id()));
                term *= pow_rational(it->second,
                                     static_cast<long>(f.exp.get_num().get_si()));
            }
        }
        out += term;
    }
    return out;
}

inline Rational eval_rational(const Expr& e, const Point& point) {
    Rational d = poly_eval(e.den(), point);
    if (d == 0) throw DivisionByZero("evaluation hit a pole");
    return poly_eval(e.num(), point) / d;
}

// Floating-point evaluation for the numeric harnesses. Fractional powers go
// through std::pow, so guard bases only need to be positive at the point.
using DoublePoint = std::map<SymbolId, double>;

inline double poly_eval_double(const Poly& p, const DoublePoint& point) {
    double out = 0.0;
    for (const auto& t : p.terms) {
        double term = t.second.get_d();
        for (const auto& f : t.first.factors) {
            double base;
            if (f.atom.is_guard())
                base = poly_eval_double(guard_base(f.atom), point);
            else {
                auto it = point.find(f.atom.symbol_id());
                if (it == point.end())
                    throw UnknownSymbol(symbol_name(f.atom.symbol_id()));
                base = it->second;
            }
            term *= std::pow(base, f.exp.get_d());
        }
        out += term;
    }
    return out;
}

inline double eval_double(const Expr& e, const DoublePoint& point) {
    double d = poly_eval_double(e.den(), point);
    if (d == 0.0) throw DivisionByZero("evaluation hit a pole");
    return poly_eval_double(e.num(), point) / d;
}

// ---------------------------------------------------------------------------
// Printing (grammar-conformant; parse(print(e)) == e)

inline std::string print_poly(const Poly& p);

inline std::string print_factor(const Factor& f) {
    std::string base;
    if (f.atom.is_guard())
        base = "(" + print_poly(guard_base(f.atom)) + ")";
    else
        base = symbol_name(f.atom.symbol_id());
    if (f.exp == 1) return base;
    if (f.exp.get_den() == 1) return base + "^" + f.exp.get_num().get_str();
    return base + "^(" + f.exp.get_num().get_str() + "/" + f.exp.get_den().get_str() + ")";
}

inline std::string print_term(const Monomial& m, const Rational& coeff_abs) {
    std::string out;
    bool need_star = false;
    if (coeff_abs != 1 || m.empty()) {
        out += coeff_abs.get_str();
        need_star = true;
    }
    for (const auto& f : m.factors) {
        if (need_star) out += "*";
        out += print_factor(f);
        need_star = true;
    }
    return out;
}

inline std::string print_poly(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : p.terms) {
        if (first) {
            if (sgn(c) < 0) out += "-";
            out += print_term(m, abs(c));
            first = false;
        } else {
            out += (sgn(c) < 0) ? "-" : "+";
            out += print_term(m, abs(c));
        }
    }
    return out;
}

inline std::string print_expr(const Expr& e) {
    if (e.den().is_one()) return print_poly(e.num());
    std::string num = print_poly(e.num());
    if (e.num().terms.size() > 1) num = "(" + num + ")";
    const Poly& d = e.den();
    bool bare = d.terms.size() == 1 && d.terms[0].second == 1 &&
                d.terms[0].first.factors.size() == 1;
    std::string den = print_poly(d);
    if (!bare) den = "(" + den + ")";
    return num + "/" + den;
}

} // namespace jetforge

#endif
