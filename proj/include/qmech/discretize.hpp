#pragma once

#include "qmech/oracle.hpp"
#include "qmech/pmf.hpp"
#include "qmech/scalar.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qmech {

enum class Scheme { Value, QuantileGeometric, QuantileUniform };

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Value: return "value";
        case Scheme::QuantileGeometric: return "quantile";
        case Scheme::QuantileUniform: return "quantile-uniform";
    }
    return "?";
}

// Result of one discretization pass over one marginal: the rounded-down
// distribution plus the raw grid (pre-merge) and query counts.
template <class T>
struct DiscretizedPrior {
    DiscretePmf<T> pmf;
    std::vector<T> grid_values;     // per grid slot l
    std::vector<T> grid_quantiles;  // per grid slot l
    Scheme scheme = Scheme::Value;
    T delta{};
    T eps1{};
    T H{};
    std::int64_t value_queries = 0;
    std::int64_t quantile_queries = 0;
};

// Queries an explicit ascending value grid and differences the answers.
// Requires support in [1, H]: the probe at the bottom must return full mass.
template <class O, class T = typename O::scalar>
DiscretizedPrior<T> discretize_value_grid(O& oracle, std::vector<T> grid, const T& H,
                                          const T& delta) {
    DiscretizedPrior<T> out;
    out.scheme = Scheme::Value;
    out.delta = delta;
    out.H = H;

    std::vector<T> q;
    q.reserve(grid.size());
    for (const auto& v : grid) q.push_back(oracle.value_query(v));
    out.value_queries = static_cast<std::int64_t>(grid.size());

    T slack = scalar_traits<T>::exact ? T(0) : T(1e-9);
    if (q.front() + slack < T(1))
        throw std::domain_error("discretize_value: support extends below 1");

    std::vector<std::pair<T, T>> atoms;
    for (std::size_t l = 0; l < grid.size(); ++l) {
        T next = (l + 1 < grid.size()) ? q[l + 1] : T(0);
        atoms.emplace_back(grid[l], q[l] - next);
    }
    out.grid_values = std::move(grid);
    out.grid_quantiles = std::move(q);
    out.pmf = DiscretePmf<T>::from_atoms(std::move(atoms));
    return out;
}

// Geometric value grid (1, r, ..., r^(k-1), H) for ratio r = 1+delta.  The
// exponent count k may be supplied by the caller (mechanisms compute it
// exactly from rational parameters even when T is double).
template <class T>
std::vector<T> value_grid_geometric(const T& ratio, const T& H, long k) {
    std::vector<T> grid;
    grid.reserve(static_cast<std::size_t>(k) + 1);
    T p(1);
    for (long l = 0; l < k; ++l) {
        grid.push_back(p);
        p *= ratio;
    }
    grid.push_back(H);
    return grid;
}

// k = ceil(log_{1+d} H); masses are consecutive differences of the queried
// tail probabilities.
template <class O, class T = typename O::scalar>
DiscretizedPrior<T> discretize_value(O& oracle, const T& H, const T& delta) {
    if (!(H >= T(1))) throw std::domain_error("discretize_value: H must be >= 1");
    if (!(delta > T(0))) throw std::domain_error("discretize_value: delta must be positive");
    long k = ceil_log_ratio(T(1) + delta, H);
    return discretize_value_grid(oracle, value_grid_geometric(T(1) + delta, H, k), H, delta);
}

namespace detail {

template <class O, class T>
DiscretizedPrior<T> discretize_from_quantile_grid(O& oracle, std::vector<T> grid_q,
                                                  Scheme scheme) {
    DiscretizedPrior<T> out;
    out.scheme = scheme;
    std::vector<T> vals;
    vals.reserve(grid_q.size());
    for (const auto& q : grid_q) {
        auto ans = oracle.quantile_query(q);
        if (ans.infinite)
            throw std::domain_error("discretize: infinite quantile answer at positive q");
        vals.push_back(ans.value);
    }
    out.quantile_queries = static_cast<std::int64_t>(grid_q.size());

    std::vector<std::pair<T, T>> atoms;
    for (std::size_t l = 0; l < grid_q.size(); ++l) {
        T next = (l + 1 < grid_q.size()) ? grid_q[l + 1] : T(0);
        atoms.emplace_back(vals[l], grid_q[l] - next);
    }
    out.grid_values = std::move(vals);
    out.grid_quantiles = std::move(grid_q);
    out.pmf = DiscretePmf<T>::from_atoms(std::move(atoms));
    return out;
}

}  // namespace detail

// Geometric quantile grid (1, e1*r^(k-1), ..., e1*r, e1) for ratio r = 1+delta
// with explicit k.
template <class T>
std::vector<T> quantile_grid_geometric(const T& ratio, const T& eps1, long k) {
    std::vector<T> grid_q;
    grid_q.reserve(static_cast<std::size_t>(k) + 1);
    grid_q.push_back(T(1));
    std::vector<T> tail;
    tail.reserve(static_cast<std::size_t>(k));
    T p = eps1;
    for (long l = 0; l < k; ++l) {
        tail.push_back(p);
        p *= ratio;
    }
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) grid_q.push_back(*it);
    return grid_q;
}

// Queries an explicit descending quantile grid; equal answers merge into one
// atom.
template <class O, class T = typename O::scalar>
DiscretizedPrior<T> discretize_quantile_grid(O& oracle, std::vector<T> grid_q, const T& delta,
                                             const T& eps1, Scheme scheme) {
    auto out = detail::discretize_from_quantile_grid(oracle, std::move(grid_q), scheme);
    out.delta = delta;
    out.eps1 = eps1;
    return out;
}

// k = ceil(log_{1+d}(1/e1)).
template <class O, class T = typename O::scalar>
DiscretizedPrior<T> discretize_quantile(O& oracle, const T& delta, const T& eps1) {
    if (!(delta > T(0))) throw std::domain_error("discretize_quantile: delta must be positive");
    if (!(eps1 > T(0) && eps1 <= T(1)))
        throw std::domain_error("discretize_quantile: eps1 must be in (0,1]");
    long k = ceil_log_ratio(T(1) + delta, T(1) / eps1);
    return discretize_quantile_grid(oracle, quantile_grid_geometric(T(1) + delta, eps1, k),
                                    delta, eps1, Scheme::QuantileGeometric);
}

// Uniform quantile grid (1, k*e1, (k-1)*e1, ..., e1) with explicit k.
template <class T>
std::vector<T> quantile_grid_uniform(const T& eps1, long k) {
    std::vector<T> grid_q;
    grid_q.reserve(static_cast<std::size_t>(k) + 1);
    grid_q.push_back(T(1));
    for (long l = 1; l <= k; ++l) grid_q.push_back(scalar_traits<T>::from_int(k + 1 - l) * eps1);
    return grid_q;
}

// k = floor(1/e1).
template <class O, class T = typename O::scalar>
DiscretizedPrior<T> discretize_quantile_uniform(O& oracle, const T& eps1) {
    if (!(eps1 > T(0) && eps1 <= T(1)))
        throw std::domain_error("discretize_quantile_uniform: eps1 must be in (0,1]");
    long k = floor_reciprocal(eps1);
    return discretize_quantile_grid(oracle, quantile_grid_uniform(eps1, k), T(0), eps1,
                                    Scheme::QuantileUniform);
}

}  // namespace qmech
