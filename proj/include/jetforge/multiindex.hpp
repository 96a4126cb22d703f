#ifndef JETFORGE_MULTIINDEX_HPP
#define JETFORGE_MULTIINDEX_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "jetforge/errors.hpp"

namespace jetforge {

// Derivative multi-index over n independent variables. Ordered by total
// order first, then lexicographically; every enumeration, matrix layout and
// printed table in the engine uses this one order.
class MultiIndex {
  public:
    MultiIndex() = default;
    explicit MultiIndex(std::size_t n) : exp_(n, 0) {}
    explicit MultiIndex(std::vector<std::uint32_t> exp) : exp_(std::move(exp)) {}

    std::size_t size() const { return exp_.size(); }
    std::uint32_t operator[](std::size_t i) const { return exp_[i]; }
    std::uint32_t& operator[](std::size_t i) { return exp_[i]; }
    const std::vector<std::uint32_t>& exponents() const { return exp_; }

    std::uint32_t order() const {
        return std::accumulate(exp_.begin(), exp_.end(), std::uint32_t{0});
    }

    MultiIndex plus(std::size_t i) const {
        MultiIndex out = *this;
        out.exp_[i] += 1;
        return out;
    }

    MultiIndex minus(std::size_t i) const {
        if (exp_[i] == 0) throw OrderMismatch("multi-index underflow");
        MultiIndex out = *this;
        out.exp_[i] -= 1;
        return out;
    }

    MultiIndex plus(const MultiIndex& other) const {
        MultiIndex out = *this;
        for (std::size_t i = 0; i < exp_.size(); ++i) out.exp_[i] += other.exp_[i];
        return out;
    }

    // First index with a nonzero entry; used to pick the canonical recursion
    // path when filling prolongation tables.
    std::size_t first_nonzero() const {
        for (std::size_t i = 0; i < exp_.size(); ++i)
            if (exp_[i] > 0) return i;
        throw OrderMismatch("zero multi-index has no nonzero entry");
    }

    // alpha! as a plain integer (orders stay small enough for unsigned long).
    unsigned long factorial() const {
        unsigned long f = 1;
        for (auto e : exp_)
            for (std::uint32_t j = 2; j <= e; ++j) f *= j;
        return f;
    }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
        return a.exp_ == b.exp_;
    }

    friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
        if (auto c = a.order() <=> b.order(); c != 0) return c;
        return a.exp_ <=> b.exp_;
    }

    std::string str() const {
        std::string out = "[";
        for (std::size_t i = 0; i < exp_.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(exp_[i]);
        }
        return out + "]";
    }

  private:
    std::vector<std::uint32_t> exp_;
};

inline unsigned long binomial(unsigned long n, unsigned long k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned long r = 1;
    for (unsigned long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// All multi-indices with |J| == q over n variables, in canonical order.
inline std::vector<MultiIndex> multi_indices_of_order(std::size_t n, std::uint32_t q) {
    std::vector<MultiIndex> out;
    MultiIndex cur(n);
    auto rec = [&](auto&& self, std::size_t pos, std::uint32_t remaining) -> void {
        if (pos + 1 == n) {
            cur[pos] = remaining;
            out.push_back(cur);
            return;
        }
        for (std::uint32_t e = 0; e <= remaining; ++e) {
            cur[pos] = e;
            self(self, pos + 1, remaining - e);
        }
        cur[pos] = 0;
    };
    if (n == 0) {
        if (q == 0) out.push_back(MultiIndex(std::vector<std::uint32_t>{}));
        return out;
    }
    rec(rec, 0, q);
    std::sort(out.begin(), out.end());
    return out;
}

// All multi-indices with |J| <= q, ordered by (|J|, lex).
inline std::vector<MultiIndex> multi_indices_up_to(std::size_t n, std::uint32_t q) {
    std::vector<MultiIndex> out;
    for (std::uint32_t h = 0; h <= q; ++h) {
        auto level = multi_indices_of_order(n, h);
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

} // namespace jetforge

#endif
