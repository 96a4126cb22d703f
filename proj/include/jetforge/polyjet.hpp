#ifndef JETFORGE_POLYJET_HPP
#define JETFORGE_POLYJET_HPP

#include <cmath>
#include <map>
#include <type_traits>
#include <vector>

#include "jetforge/multiindex.hpp"
#include "jetforge/rational.hpp"

namespace jetforge {

template <class K>
struct ScalarTraits {
    static bool is_zero(const K& x) { return x == K(0); }
    // Pivot preference for elimination; exact scalars take the first nonzero.
    static double weight(const K&) { return 1.0; }
};

template <>
struct ScalarTraits<double> {
    static bool is_zero(double x) { return x == 0.0; }
    static double weight(double x) { return std::fabs(x); }
};

// Polynomial truncated at total degree <= ord, over nvars variables. The
// scalar is Rational for exact jets and double for the numeric flow harness.
template <class K>
struct TruncSeries {
    std::size_t nvars = 0;
    std::uint32_t ord = 0;
    std::map<MultiIndex, K> terms;

    TruncSeries() = default;
    TruncSeries(std::size_t n, std::uint32_t k) : nvars(n), ord(k) {}

    static TruncSeries constant(std::size_t n, std::uint32_t k, const K& c) {
        TruncSeries s(n, k);
        if (!ScalarTraits<K>::is_zero(c)) s.terms[MultiIndex(n)] = c;
        return s;
    }

    static TruncSeries variable(std::size_t n, std::uint32_t k, std::size_t i) {
        TruncSeries s(n, k);
        if (k >= 1) s.terms[MultiIndex(n).plus(i)] = K(1);
        return s;
    }

    K coeff(const MultiIndex& j) const {
        auto it = terms.find(j);
        return it == terms.end() ? K(0) : it->second;
    }

    void set(const MultiIndex& j, const K& v) {
        if (ScalarTraits<K>::is_zero(v))
            terms.erase(j);
        else
            terms[j] = v;
    }

    K constant_term() const { return coeff(MultiIndex(nvars)); }

    TruncSeries truncated(std::uint32_t k) const {
        TruncSeries out(nvars, k);
        for (const auto& [j, c] : terms)
            if (j.order() <= k) out.terms.emplace(j, c);
        return out;
    }

    friend TruncSeries operator+(const TruncSeries& a, const TruncSeries& b) {
        TruncSeries out = a;
        for (const auto& [j, c] : b.terms) {
            auto it = out.terms.find(j);
            if (it == out.terms.end()) {
                out.terms.emplace(j, c);
            } else {
                it->second = it->second + c;
                if (ScalarTraits<K>::is_zero(it->second)) out.terms.erase(it);
            }
        }
        return out;
    }

    friend TruncSeries operator-(const TruncSeries& a) {
        TruncSeries out = a;
        for (auto& [j, c] : out.terms) c = -c;
        return out;
    }

    friend TruncSeries operator-(const TruncSeries& a, const TruncSeries& b) {
        return a + (-b);
    }

    friend TruncSeries operator*(const TruncSeries& a, const K& s) {
        TruncSeries out(a.nvars, a.ord);
        if (ScalarTraits<K>::is_zero(s)) return out;
        out = a;
        for (auto& [j, c] : out.terms) c = c * s;
        return out;
    }

    friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
        TruncSeries out(a.nvars, a.ord);
        for (const auto& [ja, ca] : a.terms) {
            for (const auto& [jb, cb] : b.terms) {
                if (ja.order() + jb.order() > out.ord) continue;
                MultiIndex j = ja.plus(jb);
                K v = ca * cb;
                auto it = out.terms.find(j);
                if (it == out.terms.end()) {
                    if (!ScalarTraits<K>::is_zero(v)) out.terms.emplace(std::move(j), v);
                } else {
                    it->second = it->second + v;
                    if (ScalarTraits<K>::is_zero(it->second)) out.terms.erase(it);
                }
            }
        }
        return out;
    }

    TruncSeries pow(std::uint32_t e) const {
        TruncSeries out = constant(nvars, ord, K(1));
        for (std::uint32_t i = 0; i < e; ++i) out = out * (*this);
        return out;
    }

    // Substitute args[i] (constant-free series in m variables) for variable i.
    TruncSeries compose(const std::vector<TruncSeries>& args) const {
        if (args.size() != nvars) throw OrderMismatch("composition arity mismatch");
        std::size_t m = args.empty() ? 0 : args[0].nvars;
        TruncSeries out(m, ord);
        // Memoized powers of each argument.
        std::vector<std::vector<TruncSeries>> pw(nvars);
        for (std::size_t i = 0; i < nvars; ++i)
            pw[i].push_back(constant(m, ord, K(1)));
        for (const auto& [j, c] : terms) {
            TruncSeries prod = constant(m, ord, c);
            for (std::size_t i = 0; i < nvars; ++i) {
                std::uint32_t e = j[i];
                while (pw[i].size() <= e) pw[i].push_back(pw[i].back() * args[i]);
                if (e > 0) prod = prod * pw[i][e];
            }
            out = out + prod;
        }
        return out;
    }
};

// Partial derivative in variable i; the result is honest only to ord-1.
template <class K>
TruncSeries<K> series_derivative(const TruncSeries<K>& a, std::size_t i) {
    TruncSeries<K> out(a.nvars, a.ord == 0 ? 0 : a.ord - 1);
    for (const auto& [j, c] : a.terms) {
        if (j[i] == 0) continue;
        out.set(j.minus(i), c * K(static_cast<long>(j[i])));
    }
    return out;
}

// Inverse of a series with nonzero constant term, coefficient by coefficient.
template <class K>
TruncSeries<K> series_reciprocal(const TruncSeries<K>& a) {
    K c0 = a.constant_term();
    if (ScalarTraits<K>::is_zero(c0)) throw DivisionByZero("series has zero constant term");
    TruncSeries<K> inv(a.nvars, a.ord);
    K r0 = K(1) / c0;
    inv.set(MultiIndex(a.nvars), r0);
    // (a * inv)_J = delta_{J,0}: solve for inv_J by increasing order.
    for (std::uint32_t h = 1; h <= a.ord; ++h) {
        for (const auto& j : multi_indices_of_order(a.nvars, h)) {
            K acc = K(0);
            // sum over splits j = p + q with q < j handled via iterating
            // current inv terms against a.
            for (const auto& [p, ac] : a.terms) {
                if (p.order() == 0 || p.order() > h) continue;
                // q = j - p if componentwise possible
                bool ok = true;
                MultiIndex q(a.nvars);
                for (std::size_t i = 0; i < a.nvars; ++i) {
                    if (p[i] > j[i]) {
                        ok = false;
                        break;
                    }
                    q[i] = j[i] - p[i];
                }
                if (!ok) continue;
                acc = acc + ac * inv.coeff(q);
            }
            inv.set(j, -(acc * r0));
        }
    }
    return inv;
}

// Small dense inverse over the scalar field.
template <class K>
std::vector<std::vector<K>> matrix_inverse(std::vector<std::vector<K>> m) {
    std::size_t n = m.size();
    std::vector<std::vector<K>> inv(n, std::vector<K>(n, K(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = K(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t best = c;
        double bw = -1.0;
        for (std::size_t r = c; r < n; ++r) {
            if (ScalarTraits<K>::is_zero(m[r][c])) continue;
            double w = ScalarTraits<K>::weight(m[r][c]);
            if (w > bw) {
                bw = w;
                best = r;
            }
        }
        if (bw < 0.0) throw SingularLinearPart();
        std::swap(m[c], m[best]);
        std::swap(inv[c], inv[best]);
        K p = m[c][c];
        for (std::size_t j = 0; j < n; ++j) {
            m[c][j] = m[c][j] / p;
            inv[c][j] = inv[c][j] / p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || ScalarTraits<K>::is_zero(m[r][c])) continue;
            K f = m[r][c];
            for (std::size_t j = 0; j < n; ++j) {
                m[r][j] = m[r][j] - f * m[c][j];
                inv[r][j] = inv[r][j] - f * inv[c][j];
            }
        }
    }
    return inv;
}

// Jet of a map R^p -> R^q at a point: source, value at the source, and the
// deviation series (Taylor coefficients, constant term zero) per component.
template <class K>
struct PolyJetT {
    std::vector<K> source;
    std::vector<K> target;
    std::uint32_t ord = 0;
    std::vector<TruncSeries<K>> dev;

    std::size_t source_dim() const { return source.size(); }
    std::size_t target_dim() const { return target.size(); }

    static PolyJetT identity(const std::vector<K>& point, std::uint32_t k) {
        PolyJetT j;
        j.source = point;
        j.target = point;
        j.ord = k;
        for (std::size_t i = 0; i < point.size(); ++i)
            j.dev.push_back(TruncSeries<K>::variable(point.size(), k, i));
        return j;
    }

    // Taylor coefficient of the full map (order-0 gives the target value).
    K taylor(std::size_t comp, const MultiIndex& j) const {
        if (j.order() == 0) return target[comp];
        return dev[comp].coeff(j);
    }

    // Derivative value: coefficient times the multi-index factorial.
    K derivative(std::size_t comp, const MultiIndex& j) const {
        return taylor(comp, j) * K(static_cast<long>(j.factorial()));
    }

    PolyJetT truncated(std::uint32_t k) const {
        PolyJetT out = *this;
        out.ord = k;
        for (auto& s : out.dev) s = s.truncated(k);
        return out;
    }

    std::vector<std::vector<K>> linear_part() const {
        std::size_t q = target_dim(), p = source_dim();
        std::vector<std::vector<K>> A(q, std::vector<K>(p, K(0)));
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = 0; j < p; ++j)
                A[i][j] = dev[i].coeff(MultiIndex(p).plus(j));
        return A;
    }
};

template <class K>
bool jet_points_match(const std::vector<K>& a, const std::vector<K>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i])) return false;
    return true;
}

// Exact equality of two jets: same shape, same points, same coefficients.
template <class K>
bool jets_identical(const PolyJetT<K>& a, const PolyJetT<K>& b) {
    if (a.ord != b.ord || a.source_dim() != b.source_dim() ||
        a.target_dim() != b.target_dim())
        return false;
    if (!jet_points_match(a.source, b.source) || !jet_points_match(a.target, b.target))
        return false;
    for (std::size_t c = 0; c < a.dev.size(); ++c) {
        TruncSeries<K> d = a.dev[c] - b.dev[c];
        for (const auto& [j, v] : d.terms)
            if (!ScalarTraits<K>::is_zero(v)) return false;
    }
    return true;
}

// g after f. Requires f's value to sit at g's source point.
template <class K>
PolyJetT<K> polyjet_compose(const PolyJetT<K>& g, const PolyJetT<K>& f) {
    if (f.ord != g.ord) throw OrderMismatch("jet orders differ in composition");
    if constexpr (!std::is_floating_point_v<K>) {
        if (!jet_points_match(f.target, g.source))
            throw BasePointMismatch("inner jet value is not the outer jet source");
    }
    PolyJetT<K> out;
    out.source = f.source;
    out.target = g.target;
    out.ord = f.ord;
    for (std::size_t i = 0; i < g.dev.size(); ++i)
        out.dev.push_back(g.dev[i].compose(f.dev));
    return out;
}

// Jet inverse by Newton iteration on H = A^{-1} (id - N o H).
template <class K>
PolyJetT<K> polyjet_invert(const PolyJetT<K>& f) {
    std::size_t n = f.source_dim();
    if (n != f.target_dim()) throw OrderMismatch("only square jets invert");
    auto A = f.linear_part();
    auto Ainv = matrix_inverse(A);
    // Deviations minus the linear part.
    std::vector<TruncSeries<K>> nonlin;
    for (std::size_t i = 0; i < n; ++i) {
        TruncSeries<K> s = f.dev[i];
        for (std::size_t j = 0; j < n; ++j)
            s.set(MultiIndex(n).plus(j), K(0));
        nonlin.push_back(s);
    }
    auto apply_ainv = [&](const std::vector<TruncSeries<K>>& v) {
        std::vector<TruncSeries<K>> out;
        for (std::size_t i = 0; i < n; ++i) {
            TruncSeries<K> s(n, f.ord);
            for (std::size_t j = 0; j < n; ++j) s = s + v[j] * Ainv[i][j];
            out.push_back(s);
        }
        return out;
    };
    std::vector<TruncSeries<K>> id_vars;
    for (std::size_t i = 0; i < n; ++i)
        id_vars.push_back(TruncSeries<K>::variable(n, f.ord, i));
    std::vector<TruncSeries<K>> h = apply_ainv(id_vars);
    for (std::uint32_t it = 1; it < f.ord; ++it) {
        std::vector<TruncSeries<K>> corr;
        for (std::size_t i = 0; i < n; ++i)
            corr.push_back(id_vars[i] - nonlin[i].compose(h));
        h = apply_ainv(corr);
    }
    PolyJetT<K> out;
    out.source = f.target;
    out.target = f.source;
    out.ord = f.ord;
    out.dev = std::move(h);
    return out;
}

using PolyJet = PolyJetT<Rational>;

} // namespace jetforge

#endif
