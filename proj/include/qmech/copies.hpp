#pragma once

#include "qmech/myerson.hpp"
#include "qmech/pmf.hpp"
#include "qmech/rng.hpp"
#include "qmech/scalar.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qmech {

// Single-parameter relaxation of a unit-demand instance: one element per
// (player, item) pair, feasible sets are bipartite matchings (at most one
// element per player and per item).
template <class T>
struct CopiesInstance {
    int n = 0, m = 0;
    std::vector<VirtualTable<T>> tabs;  // element (i,j) at index i*m+j

    const VirtualTable<T>& tab(int i, int j) const {
        return tabs[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
                    static_cast<std::size_t>(j)];
    }
};

template <class T>
CopiesInstance<T> build_copies(const std::vector<DiscretePmf<T>>& pmfs, int n, int m) {
    if (pmfs.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(m))
        throw std::domain_error("build_copies: need n*m marginals");
    CopiesInstance<T> cp;
    cp.n = n;
    cp.m = m;
    cp.tabs.reserve(pmfs.size());
    for (const auto& d : pmfs) cp.tabs.push_back(build_virtual_table(d));
    return cp;
}

namespace detail {

template <class T>
void matching_search(int n, int m, const std::vector<T>& w, int player,
                     std::uint32_t item_mask, T acc, T& best,
                     std::vector<int>& cur, std::vector<int>& best_assign) {
    if (player == n) {
        if (acc > best) {
            best = acc;
            best_assign = cur;
        }
        return;
    }
    // skip this player first, so zero-weight matches never enter the result
    cur[player] = -1;
    matching_search(n, m, w, player + 1, item_mask, acc, best, cur, best_assign);
    for (int j = 0; j < m; ++j) {
        if (item_mask & (1u << j)) continue;
        const T& wij = w[static_cast<std::size_t>(player) * m + j];
        if (!(wij > T(0))) continue;
        cur[player] = j;
        matching_search(n, m, w, player + 1, item_mask | (1u << j), T(acc + wij), best, cur,
                        best_assign);
    }
    cur[player] = -1;
}

}  // namespace detail

// Canonical max-weight matching over the strictly positive weights; ties
// resolve to the first matching found with players explored in index order
// and "unmatched" tried before the items.  Returns total weight and fills
// assign (per player: item index or -1).
template <class T>
T max_weight_matching(int n, int m, const std::vector<T>& w, std::vector<int>& assign) {
    if (m > 31) throw std::domain_error("max_weight_matching: too many items");
    T best(0);
    std::vector<int> cur(static_cast<std::size_t>(n), -1);
    assign.assign(static_cast<std::size_t>(n), -1);
    detail::matching_search(n, m, w, 0, 0u, T(0), best, cur, assign);
    return best;
}

// Exact expectation of the max-weight matching with weights max(ironed
// virtual, 0), over the product prior of the copies instance.
template <class T>
T opt_copies(const CopiesInstance<T>& cp) {
    const std::size_t e = cp.tabs.size();
    // per element, per support index: the clamped ironed virtual
    std::vector<std::vector<T>> wval(e);
    std::vector<const DiscretePmf<T>*> priors(e);
    for (std::size_t k = 0; k < e; ++k) {
        priors[k] = &cp.tabs[k].prior;
        wval[k].reserve(priors[k]->size());
        for (const auto& phi : cp.tabs[k].ironed) wval[k].push_back(phi > T(0) ? phi : T(0));
    }

    std::vector<std::size_t> ix(e, 0);
    std::vector<T> w(e);
    std::vector<int> assign;
    T total(0);
    for (;;) {
        T prob(1);
        for (std::size_t k = 0; k < e; ++k) {
            w[k] = wval[k][ix[k]];
            prob *= priors[k]->mass(ix[k]);
        }
        total += prob * max_weight_matching(cp.n, cp.m, w, assign);
        std::size_t d = 0;
        while (d < e && ++ix[d] == priors[d]->size()) ix[d++] = 0;
        if (d == e) break;
    }
    return total;
}

// Static posted prices for the sequential mechanism: threshold t_ij is half
// the expected matched-virtual contribution of element (i,j) under the grid
// prior, and the price is the smallest grid value whose ironed virtual
// reaches t_ij.  Thresholds are computed in double (they only select a
// support point); prices stay exact.
template <class T>
std::vector<std::optional<T>> copies_posted_prices(const CopiesInstance<T>& cp,
                                                   double enum_cap = 1e7,
                                                   std::uint64_t mc_seed = 1,
                                                   long mc_trials = 20000) {
    const std::size_t e = cp.tabs.size();
    std::vector<std::vector<double>> wd(e);
    std::vector<const DiscretePmf<T>*> priors(e);
    double profiles = 1;
    for (std::size_t k = 0; k < e; ++k) {
        priors[k] = &cp.tabs[k].prior;
        profiles *= static_cast<double>(priors[k]->size());
        for (const auto& phi : cp.tabs[k].ironed)
            wd[k].push_back(std::max(to_double(phi), 0.0));
    }

    std::vector<double> contrib(e, 0.0);
    std::vector<double> w(e);
    std::vector<int> assign;
    if (profiles <= enum_cap) {
        std::vector<std::size_t> ix(e, 0);
        for (;;) {
            double prob = 1;
            for (std::size_t k = 0; k < e; ++k) {
                w[k] = wd[k][ix[k]];
                prob *= to_double(priors[k]->mass(ix[k]));
            }
            max_weight_matching(cp.n, cp.m, w, assign);
            for (int i = 0; i < cp.n; ++i)
                if (assign[static_cast<std::size_t>(i)] >= 0) {
                    std::size_t k = static_cast<std::size_t>(i) * cp.m +
                                    static_cast<std::size_t>(assign[static_cast<std::size_t>(i)]);
                    contrib[k] += prob * w[k];
                }
            std::size_t d = 0;
            while (d < e && ++ix[d] == priors[d]->size()) ix[d++] = 0;
            if (d == e) break;
        }
    } else {
        std::vector<DiscretePmf<double>> dd;
        dd.reserve(e);
        for (std::size_t k = 0; k < e; ++k) dd.push_back(priors[k]->template cast<double>());
        for (long t = 0; t < mc_trials; ++t) {
            Rng rng(derive_seed(mc_seed, static_cast<std::uint64_t>(t)));
            std::vector<std::size_t> ix(e);
            for (std::size_t k = 0; k < e; ++k) ix[k] = dd[k].sample_index(rng);
            for (std::size_t k = 0; k < e; ++k) w[k] = wd[k][ix[k]];
            max_weight_matching(cp.n, cp.m, w, assign);
            for (int i = 0; i < cp.n; ++i)
                if (assign[static_cast<std::size_t>(i)] >= 0) {
                    std::size_t k = static_cast<std::size_t>(i) * cp.m +
                                    static_cast<std::size_t>(assign[static_cast<std::size_t>(i)]);
                    contrib[k] += w[k] / static_cast<double>(mc_trials);
                }
        }
    }

    std::vector<std::optional<T>> price(e);
    for (std::size_t k = 0; k < e; ++k) {
        double t = contrib[k] / 2;
        const auto& tab = cp.tabs[k];
        for (std::size_t l = 0; l < tab.prior.size(); ++l) {
            if (to_double(tab.ironed[l]) >= t) {
                price[k] = tab.prior.value(l);
                break;
            }
        }
    }
    return price;
}

enum class CopiesOrder { Grouped, GreedyAdversary };

template <class T>
struct CopiesOutcome {
    std::vector<int> item_of_player;  // -1 when the player bought nothing
    std::vector<T> payment;           // per player
    T revenue{};
};

// Offer each element its static price in the given order, skipping elements
// whose player or item is already taken.  Grouped order keeps each player's
// elements consecutive (copies in item order) and visits players by
// descending expected immediate revenue of their group, so a low-value
// player cannot lock an item away from a lucrative one; the greedy
// adversary processes single elements by ascending expected immediate
// revenue (price times grid acceptance probability).
template <class T>
CopiesOutcome<T> sequential_posted_price_copies(const CopiesInstance<T>& cp,
                                                const std::vector<std::optional<T>>& price,
                                                const std::vector<T>& bids,
                                                CopiesOrder order = CopiesOrder::Grouped) {
    const std::size_t e = cp.tabs.size();
    if (bids.size() != e || price.size() != e)
        throw std::domain_error("sequential_posted_price_copies: size mismatch");

    std::vector<double> score(e, 0.0);
    for (std::size_t k = 0; k < e; ++k)
        if (price[k])
            score[k] = to_double(*price[k]) * to_double(cp.tabs[k].prior.ccdf(*price[k]));

    std::vector<std::size_t> ord(e);
    for (std::size_t k = 0; k < e; ++k) ord[k] = k;
    if (order == CopiesOrder::GreedyAdversary) {
        std::vector<double> key(e);
        for (std::size_t k = 0; k < e; ++k)
            key[k] = price[k] ? score[k] : std::numeric_limits<double>::infinity();
        std::stable_sort(ord.begin(), ord.end(),
                         [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    } else {
        std::vector<double> group(static_cast<std::size_t>(cp.n), 0.0);
        for (std::size_t k = 0; k < e; ++k) group[k / static_cast<std::size_t>(cp.m)] += score[k];
        std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
            return group[a / static_cast<std::size_t>(cp.m)] >
                   group[b / static_cast<std::size_t>(cp.m)];
        });
    }

    CopiesOutcome<T> out;
    out.item_of_player.assign(static_cast<std::size_t>(cp.n), -1);
    out.payment.assign(static_cast<std::size_t>(cp.n), T(0));
    std::vector<bool> item_taken(static_cast<std::size_t>(cp.m), false);
    for (std::size_t k : ord) {
        int i = static_cast<int>(k) / cp.m;
        int j = static_cast<int>(k) % cp.m;
        if (out.item_of_player[static_cast<std::size_t>(i)] >= 0 ||
            item_taken[static_cast<std::size_t>(j)])
            continue;
        if (!price[k] || bids[k] < *price[k]) continue;
        out.item_of_player[static_cast<std::size_t>(i)] = j;
        item_taken[static_cast<std::size_t>(j)] = true;
        out.payment[static_cast<std::size_t>(i)] = *price[k];
        out.revenue += *price[k];
    }
    return out;
}

}  // namespace qmech
