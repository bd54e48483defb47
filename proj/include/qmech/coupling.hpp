#pragma once

#include "qmech/pmf.hpp"
#include "qmech/rng.hpp"
#include "qmech/scalar.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace qmech {

// Markov kernel between two finite supports, stored densely.  Rows are
// source values, columns target values; each row sums to 1.
template <class T>
struct TransitionMatrix {
    std::vector<T> from_values;
    std::vector<T> to_values;
    std::vector<std::vector<T>> prob;

    DiscretePmf<T> pushforward(const DiscretePmf<T>& src) const {
        if (src.size() != from_values.size())
            throw std::domain_error("pushforward: source support mismatch");
        std::vector<std::pair<T, T>> atoms;
        atoms.reserve(to_values.size());
        for (std::size_t j = 0; j < to_values.size(); ++j) {
            T m(0);
            for (std::size_t i = 0; i < from_values.size(); ++i)
                m += src.mass(i) * prob[i][j];
            atoms.emplace_back(to_values[j], m);
        }
        return DiscretePmf<T>::from_atoms(std::move(atoms), false);
    }
};

// Randomized round-down of src onto the grid pmf: values strictly between
// grid points drop to the grid point below; a value sitting exactly on grid
// point v'_l additionally drops one slot with probability
// (Pr_src[x >= v'_l] - Pr_grid[x >= v'_l]) / src(v'_l).  The pushforward of
// src is then exactly the grid distribution.
template <class T>
TransitionMatrix<T> round_down_matrix(const DiscretePmf<T>& src, const DiscretePmf<T>& grid) {
    TransitionMatrix<T> k;
    k.from_values = src.values();
    k.to_values = grid.values();
    k.prob.assign(src.size(), std::vector<T>(grid.size(), T(0)));
    for (std::size_t i = 0; i < src.size(); ++i) {
        const T& v = src.value(i);
        auto below = grid.index_at_or_below(v);
        if (!below) {
            // below the bottom grid point (only reachable with empirical
            // grids): clamp up to the bottom point
            k.prob[i][0] = T(1);
            continue;
        }
        std::size_t l = *below;
        if (grid.value(l) < v) {
            k.prob[i][l] = T(1);
            continue;
        }
        T down = src.ccdf(v) - grid.ccdf_at(l);
        if (down < T(0) || down > src.mass(i))
            throw std::domain_error("round_down_matrix: grid inconsistent with source");
        T p_down = down / src.mass(i);
        if (p_down > T(0)) {
            if (l == 0) throw std::domain_error("round_down_matrix: mass below bottom grid point");
            k.prob[i][l - 1] = p_down;
        }
        k.prob[i][l] = T(1) - p_down;
    }
    return k;
}

// Inverse coupling: maps a grid draw v'_l back to a src draw so that the
// pushforward of the grid distribution is exactly src.  Three branches per
// row: hop to the next grid point up, resample inside the open interval
// between the two grid points (proportionally to src), or stay put.
template <class T>
TransitionMatrix<T> resample_matrix(const DiscretePmf<T>& src, const DiscretePmf<T>& grid) {
    TransitionMatrix<T> k;
    k.from_values = grid.values();
    k.to_values = src.values();
    k.prob.assign(grid.size(), std::vector<T>(src.size(), T(0)));
    for (std::size_t l = 0; l < grid.size(); ++l) {
        const T& g = grid.value(l);
        auto gi = src.index_at_or_below(g);
        if (!gi || src.value(*gi) != g)
            throw std::domain_error("resample_matrix: grid point not in source support");
        std::size_t i = *gi;
        bool top = (l + 1 == grid.size());
        const T dmass = grid.mass(l);

        // hop up to the next grid point
        T hop(0);
        std::size_t up_i = 0;
        if (!top) {
            const T& gnext = grid.value(l + 1);
            auto upo = src.index_at_or_below(gnext);
            if (!upo || src.value(*upo) != gnext)
                throw std::domain_error("resample_matrix: grid point not in source support");
            up_i = *upo;
            hop = src.ccdf(gnext) - grid.ccdf_at(l + 1);
            k.prob[l][up_i] = hop / dmass;
        }

        // resample strictly between g and the next grid point (or above g for
        // the top row), proportionally to the source masses there
        std::size_t hi_excl = top ? src.size() : up_i;
        T interior(0);
        for (std::size_t j = i + 1; j < hi_excl; ++j) interior += src.mass(j);
        if (interior > T(0))
            for (std::size_t j = i + 1; j < hi_excl; ++j) k.prob[l][j] = src.mass(j) / dmass;

        // stay
        T stay = dmass - hop - interior;
        if (stay < T(0))
            throw std::domain_error("resample_matrix: negative stay probability");
        k.prob[l][i] += stay / dmass;
    }
    return k;
}

// Deterministic round-down for continuous sources: largest grid value <= v,
// clamped to the bottom grid point.
inline double round_down_value(double v, const std::vector<double>& grid_ascending) {
    auto it = std::upper_bound(grid_ascending.begin(), grid_ascending.end(), v);
    if (it == grid_ascending.begin()) return grid_ascending.front();
    return *(it - 1);
}

template <class T>
std::size_t sample_row(const std::vector<T>& row, Rng& rng) {
    double u = rng.uniform01();
    double acc = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        acc += to_double(row[j]);
        if (u < acc) return j;
    }
    for (std::size_t j = row.size(); j-- > 0;)
        if (row[j] > T(0)) return j;
    return 0;
}

}  // namespace qmech
