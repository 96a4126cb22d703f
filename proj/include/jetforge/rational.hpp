#ifndef JETFORGE_RATIONAL_HPP
#define JETFORGE_RATIONAL_HPP

#include <gmpxx.h>

#include <optional>
#include <string>

#include "jetforge/errors.hpp"

namespace jetforge {

// Exact rational scalar. mpq_class keeps values canonical (coprime, positive
// denominator), which is all the engine relies on.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw DivisionByZero();
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational parse_rational(const std::string& text) {
    // Accepts "p" or "p/q" with optional sign.
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            Rational r(text);
            r.canonicalize();
            return r;
        }
        Integer num(text.substr(0, slash));
        Integer den(text.substr(slash + 1));
        if (den == 0) throw DivisionByZero();
        Rational r(num, den);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw SyntaxError("malformed rational '" + text + "'", 0);
    }
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational pow_rational(const Rational& base, long e) {
    if (e == 0) return Rational(1);
    if (base == 0 && e < 0) throw DivisionByZero();
    Rational out;
    unsigned long mag = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), mag);
    mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), mag);
    if (e < 0) {
        out = Rational(out.get_den(), out.get_num());
        out.canonicalize();
    }
    return out;
}

// Exact n-th root if it exists in Q, otherwise nullopt. Only defined for
// nonnegative input when n is even.
inline std::optional<Rational> rational_root(const Rational& v, unsigned long n) {
    if (n == 0) return std::nullopt;
    if (n == 1) return v;
    if (sgn(v) < 0 && n % 2 == 0) return std::nullopt;
    Integer num_root, den_root;
    int num_exact = mpz_root(num_root.get_mpz_t(), v.get_num_mpz_t(), n);
    int den_exact = mpz_root(den_root.get_mpz_t(), v.get_den_mpz_t(), n);
    if (!num_exact || !den_exact) return std::nullopt;
    Rational r(num_root, den_root);
    r.canonicalize();
    return r;
}

// base^(p/q) in Q when that is exact; IrrationalValue otherwise.
inline Rational pow_rational_exact(const Rational& base, long p, long q) {
    if (q < 0) { p = -p; q = -q; }
    if (q == 0) throw DivisionByZero();
    if (base == 0) {
        if (p < 0) throw DivisionByZero();
        return Rational(p == 0 ? 1 : 0);
    }
    if (q == 1) return pow_rational(base, p);
    if (sgn(base) < 0) throw IrrationalValue("fractional power of a negative value");
    auto root = rational_root(base, static_cast<unsigned long>(q));
    if (!root) throw IrrationalValue();
    return pow_rational(*root, p);
}

} // namespace jetforge

#endif
