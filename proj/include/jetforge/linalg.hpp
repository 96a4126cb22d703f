#ifndef JETFORGE_LINALG_HPP
#define JETFORGE_LINALG_HPP

#include <map>
#include <optional>
#include <vector>

#include "jetforge/rational.hpp"

namespace jetforge {

using VecQ = std::vector<Rational>;

// Dense exact matrix. Elimination is plain Gauss-Jordan over Q; mpq entries
// make fraction-free tricks unnecessary at the sizes the engine meets.
struct MatQ {
    std::size_t rows = 0, cols = 0;
    std::vector<Rational> a;

    MatQ() = default;
    MatQ(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, Rational(0)) {}

    Rational& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const Rational& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    VecQ row(std::size_t i) const {
        return VecQ(a.begin() + static_cast<long>(i * cols),
                    a.begin() + static_cast<long>((i + 1) * cols));
    }

    static MatQ from_rows(const std::vector<VecQ>& rows_in) {
        MatQ m(rows_in.size(), rows_in.empty() ? 0 : rows_in[0].size());
        for (std::size_t i = 0; i < rows_in.size(); ++i) {
            if (rows_in[i].size() != m.cols) throw Error("ragged matrix rows");
            for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = rows_in[i][j];
        }
        return m;
    }
};

// In-place reduced row echelon form; returns the pivot columns.
inline std::vector<std::size_t> rref(MatQ& m) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
        std::size_t sel = r;
        while (sel < m.rows && m.at(sel, c) == 0) ++sel;
        if (sel == m.rows) continue;
        for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(sel, j), m.at(r, j));
        Rational inv = m.at(r, c);
        for (std::size_t j = c; j < m.cols; ++j) m.at(r, j) /= inv;
        for (std::size_t i = 0; i < m.rows; ++i) {
            if (i == r || m.at(i, c) == 0) continue;
            Rational f = m.at(i, c);
            for (std::size_t j = c; j < m.cols; ++j) m.at(i, j) -= f * m.at(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank(MatQ m) { return rref(m).size(); }

// Basis of the right nullspace, one vector per free column, in ascending
// free-column order with the free coordinate set to 1.
inline std::vector<VecQ> nullspace(MatQ m) {
    auto pivots = rref(m);
    std::vector<bool> is_pivot(m.cols, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<VecQ> basis;
    for (std::size_t f = 0; f < m.cols; ++f) {
        if (is_pivot[f]) continue;
        VecQ v(m.cols, Rational(0));
        v[f] = 1;
        for (std::size_t p = 0; p < pivots.size(); ++p)
            v[pivots[p]] = -m.at(p, f);
        basis.push_back(std::move(v));
    }
    return basis;
}

// One solution of A x = b, if any.
inline std::optional<VecQ> solve(const MatQ& A, const VecQ& b) {
    MatQ aug(A.rows, A.cols + 1);
    for (std::size_t i = 0; i < A.rows; ++i) {
        for (std::size_t j = 0; j < A.cols; ++j) aug.at(i, j) = A.at(i, j);
        aug.at(i, A.cols) = b[i];
    }
    auto pivots = rref(aug);
    if (!pivots.empty() && pivots.back() == A.cols) return std::nullopt;
    VecQ x(A.cols, Rational(0));
    for (std::size_t p = 0; p < pivots.size(); ++p) x[pivots[p]] = aug.at(p, A.cols);
    return x;
}

// Canonical basis of the row space (nonzero RREF rows).
inline std::vector<VecQ> row_space_basis(MatQ m) {
    auto pivots = rref(m);
    std::vector<VecQ> out;
    for (std::size_t i = 0; i < pivots.size(); ++i) out.push_back(m.row(i));
    return out;
}

inline bool in_span(const std::vector<VecQ>& basis, const VecQ& v) {
    if (basis.empty()) {
        for (const auto& x : v)
            if (x != 0) return false;
        return true;
    }
    MatQ m = MatQ::from_rows(basis);
    std::size_t r0 = rank(m);
    std::vector<VecQ> all = basis;
    all.push_back(v);
    return rank(MatQ::from_rows(all)) == r0;
}

inline bool subspace_equal(const std::vector<VecQ>& a, const std::vector<VecQ>& b) {
    for (const auto& v : a)
        if (!in_span(b, v)) return false;
    for (const auto& v : b)
        if (!in_span(a, v)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Sparse elimination for large, mostly-empty systems (invariant search).

struct SparseMat {
    std::size_t cols = 0;
    std::vector<std::map<std::size_t, Rational>> rows;

    void add_row(std::map<std::size_t, Rational> r) {
        for (auto it = r.begin(); it != r.end();)
            it = (it->second == 0) ? r.erase(it) : std::next(it);
        rows.push_back(std::move(r));
    }
};

// Nullspace basis of a sparse matrix, same conventions as the dense variant.
inline std::vector<VecQ> sparse_nullspace(const SparseMat& m) {
    // Echelonize: map pivot column -> reduced row.
    std::map<std::size_t, std::map<std::size_t, Rational>> pivots;
    for (const auto& row_in : m.rows) {
        std::map<std::size_t, Rational> row = row_in;
        for (;;) {
            if (row.empty()) break;
            std::size_t lead = row.begin()->first;
            auto p = pivots.find(lead);
            if (p == pivots.end()) {
                Rational inv = row.begin()->second;
                for (auto& [c, v] : row) v /= inv;
                pivots.emplace(lead, std::move(row));
                break;
            }
            Rational f = row.begin()->second;
            for (const auto& [c, v] : p->second) {
                auto it = row.find(c);
                if (it == row.end()) {
                    row.emplace(c, -f * v);
                } else {
                    it->second -= f * v;
                    if (it->second == 0) row.erase(it);
                }
            }
        }
    }
    // Back-substitute to full reduction.
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
        auto& row = it->second;
        for (auto jt = std::next(row.begin()); jt != row.end();) {
            auto p = pivots.find(jt->first);
            if (p == pivots.end() || p->first == it->first) {
                ++jt;
                continue;
            }
            Rational f = jt->second;
            // Subtract f * pivot row.
            for (const auto& [c, v] : p->second) {
                if (c == p->first) continue;
                auto rt = row.find(c);
                if (rt == row.end()) {
                    row.emplace(c, -f * v);
                } else {
                    rt->second -= f * v;
                    if (rt->second == 0) row.erase(rt);
                }
            }
            jt = row.erase(row.find(p->first));
            jt = row.upper_bound(it->first);
        }
    }
    std::vector<VecQ> basis;
    for (std::size_t f = 0; f < m.cols; ++f) {
        if (pivots.count(f)) continue;
        VecQ v(m.cols, Rational(0));
        v[f] = 1;
        for (const auto& [pc, row] : pivots) {
            auto it = row.find(f);
            if (it != row.end()) v[pc] = -it->second;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace jetforge

#endif
