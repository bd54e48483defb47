#pragma once

#include "qmech/instance.hpp"
#include "qmech/pmf.hpp"
#include "qmech/scalar.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qmech {

template <class T>
struct LpResult {
    T value{};
    std::vector<T> primal;
    T duality_gap{};
    long pivots = 0;
};

// Maximizes c.y subject to A y <= b, y >= 0, with every b_i >= 0 so the slack
// basis is feasible.  Bland's rule keeps the walk finite under degeneracy.
// Dense tableau; fine at the problem sizes this library targets.
template <class T>
LpResult<T> simplex_max(const std::vector<std::vector<T>>& A, const std::vector<T>& b,
                        const std::vector<T>& c) {
    const std::size_t rows = A.size();
    const std::size_t cols = c.size();
    for (const auto& bi : b)
        if (bi < T(0)) throw std::domain_error("simplex_max: rhs must be nonnegative");
    if (b.size() != rows) throw std::invalid_argument("simplex_max: rhs size mismatch");

    const std::size_t width = cols + rows + 1;  // structural + slack + rhs
    std::vector<std::vector<T>> tab(rows + 1, std::vector<T>(width, T(0)));
    for (std::size_t i = 0; i < rows; ++i) {
        if (A[i].size() != cols) throw std::invalid_argument("simplex_max: row size mismatch");
        for (std::size_t j = 0; j < cols; ++j) tab[i + 1][j] = A[i][j];
        tab[i + 1][cols + i] = T(1);
        tab[i + 1][width - 1] = b[i];
    }
    for (std::size_t j = 0; j < cols; ++j) tab[0][j] = -c[j];

    std::vector<std::size_t> basis(rows);
    for (std::size_t i = 0; i < rows; ++i) basis[i] = cols + i;

    const T zero(0);
    long pivots = 0;
    for (;;) {
        std::size_t enter = width - 1;
        for (std::size_t j = 0; j + 1 < width; ++j) {
            if (tab[0][j] < zero) {
                enter = j;
                break;
            }
        }
        if (enter == width - 1) break;

        std::size_t leave = 0;
        bool found = false;
        T best_ratio(0);
        for (std::size_t i = 1; i <= rows; ++i) {
            if (tab[i][enter] <= zero) continue;
            T ratio = tab[i][width - 1] / tab[i][enter];
            if (!found || ratio < best_ratio ||
                (ratio == best_ratio && basis[i - 1] < basis[leave - 1])) {
                found = true;
                best_ratio = ratio;
                leave = i;
            }
        }
        if (!found) throw std::runtime_error("simplex_max: unbounded objective");

        T piv = tab[leave][enter];
        for (std::size_t j = 0; j < width; ++j) tab[leave][j] /= piv;
        for (std::size_t i = 0; i <= rows; ++i) {
            if (i == leave) continue;
            T f = tab[i][enter];
            if (f == zero) continue;
            for (std::size_t j = 0; j < width; ++j) tab[i][j] -= f * tab[leave][j];
        }
        basis[leave - 1] = enter;
        ++pivots;
    }

    LpResult<T> out;
    out.value = tab[0][width - 1];
    out.primal.assign(cols, T(0));
    for (std::size_t i = 0; i < rows; ++i)
        if (basis[i] < cols) out.primal[basis[i]] = tab[i + 1][width - 1];
    // Dual value read off the slack columns of the objective row; the gap is
    // identically zero at an optimal basis and is reported as a sanity check.
    T dual(0);
    for (std::size_t i = 0; i < rows; ++i) dual += tab[0][cols + i] * b[i];
    out.duality_gap = dual - out.value;
    if (out.duality_gap < zero) out.duality_gap = -out.duality_gap;
    out.pivots = pivots;
    return out;
}

// Optimal truthful single-buyer revenue over randomized menus: one allocation
// vector and one payment per type, individually rational and incentive
// compatible across all type pairs.  Types are the product of the m marginal
// supports.
template <class T>
LpResult<T> opt_single_buyer_lp(const std::vector<DiscretePmf<T>>& marginals, ValClass vc,
                                std::size_t type_cap = 1000) {
    const std::size_t m = marginals.size();
    if (m == 0) throw std::invalid_argument("opt_single_buyer_lp: no marginals");

    std::size_t types = 1;
    for (const auto& d : marginals) {
        types *= d.size();
        if (types > type_cap) throw std::domain_error("opt_single_buyer_lp: type space too large");
    }

    std::vector<std::vector<T>> vals(types, std::vector<T>(m));
    std::vector<T> w(types, T(1));
    std::vector<std::size_t> idx(m, 0);
    for (std::size_t t = 0; t < types; ++t) {
        for (std::size_t j = 0; j < m; ++j) {
            vals[t][j] = marginals[j].value(idx[j]);
            w[t] *= marginals[j].mass(idx[j]);
        }
        for (std::size_t j = m; j-- > 0;) {
            if (++idx[j] < marginals[j].size()) break;
            idx[j] = 0;
        }
    }

    // Variables: x_{t,j} (types*m), then p+_t, then p-_t.
    const std::size_t nx = types * m;
    const std::size_t cols = nx + 2 * types;
    auto xcol = [m](std::size_t t, std::size_t j) { return t * m + j; };
    auto pp = [nx](std::size_t t) { return nx + t; };
    auto pm = [nx, types = types](std::size_t t) { return nx + types + t; };

    std::vector<std::vector<T>> A;
    std::vector<T> b;

    // Unit demand buyers value a random bundle by the expected value of the
    // received item when at most one item is allocated (sum x <= 1), so the
    // additive expression remains correct once that cap is in place.
    for (std::size_t t = 0; t < types; ++t) {
        // IR: p_t - sum_j v_tj x_tj <= 0
        std::vector<T> row(cols, T(0));
        for (std::size_t j = 0; j < m; ++j) row[xcol(t, j)] = -vals[t][j];
        row[pp(t)] = T(1);
        row[pm(t)] = T(-1);
        A.push_back(std::move(row));
        b.push_back(T(0));
    }
    for (std::size_t t = 0; t < types; ++t) {
        for (std::size_t r = 0; r < types; ++r) {
            if (r == t) continue;
            // IC: utility(report r with type t) - utility(truth) <= 0
            std::vector<T> row(cols, T(0));
            for (std::size_t j = 0; j < m; ++j) {
                row[xcol(r, j)] += vals[t][j];
                row[xcol(t, j)] -= vals[t][j];
            }
            row[pp(r)] -= T(1);
            row[pm(r)] += T(1);
            row[pp(t)] += T(1);
            row[pm(t)] -= T(1);
            A.push_back(std::move(row));
            b.push_back(T(0));
        }
    }
    for (std::size_t t = 0; t < types; ++t) {
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<T> row(cols, T(0));
            row[xcol(t, j)] = T(1);
            A.push_back(std::move(row));
            b.push_back(T(1));
        }
        if (vc != ValClass::Additive && m > 1) {
            std::vector<T> row(cols, T(0));
            for (std::size_t j = 0; j < m; ++j) row[xcol(t, j)] = T(1);
            A.push_back(std::move(row));
            b.push_back(T(1));
        }
    }

    std::vector<T> c(cols, T(0));
    for (std::size_t t = 0; t < types; ++t) {
        c[pp(t)] = w[t];
        c[pm(t)] = -w[t];
    }

    return simplex_max(A, b, c);
}

}  // namespace qmech
