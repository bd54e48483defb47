#pragma once

#include "qmech/myerson.hpp"
#include "qmech/pmf.hpp"
#include "qmech/scalar.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qmech {

// Second-price floors for player i against fixed opponent bids: beta[j] is
// the highest opposing bid on item j, and win_tie[j] says whether i takes
// item j at equality (i precedes every opposing maximizer).
template <class T>
struct BetaProfile {
    std::vector<T> beta;
    std::vector<bool> win_tie;

    bool operator<(const BetaProfile& o) const {
        if (beta != o.beta) return beta < o.beta;
        return win_tie < o.win_tie;
    }
};

template <class T>
BetaProfile<T> beta_profile(int n, int m, const std::vector<T>& bids, int i) {
    BetaProfile<T> bp;
    bp.beta.assign(static_cast<std::size_t>(m), T(0));
    bp.win_tie.assign(static_cast<std::size_t>(m), true);
    for (int j = 0; j < m; ++j) {
        T best(0);
        int best_i = -1;
        for (int o = 0; o < n; ++o) {
            if (o == i) continue;
            const T& v = bids[static_cast<std::size_t>(o) * m + j];
            if (best_i < 0 || v > best) {
                best = v;
                best_i = o;
            }
        }
        if (best_i >= 0) {
            bp.beta[static_cast<std::size_t>(j)] = best;
            bp.win_tie[static_cast<std::size_t>(j)] = (i < best_i);
        }
    }
    return bp;
}

namespace detail {

template <class T>
bool takes_item(const T& v, const T& beta, bool win_tie) {
    return v > beta || (v == beta && win_tie);
}

// enumerate player i's grid profiles: f(surplus, beta_paid, weight)
template <class T, class F>
void for_each_quote(const std::vector<const DiscretePmf<T>*>& prior, const BetaProfile<T>& bp,
                    F&& f) {
    const std::size_t m = prior.size();
    std::vector<std::size_t> ix(m, 0);
    for (;;) {
        T w(1), surplus(0), beta_paid(0);
        for (std::size_t j = 0; j < m; ++j) {
            const T& v = prior[j]->value(ix[j]);
            w *= prior[j]->mass(ix[j]);
            if (takes_item(v, bp.beta[j], bp.win_tie[j])) {
                surplus += v - bp.beta[j];
                beta_paid += bp.beta[j];
            }
        }
        f(surplus, beta_paid, w);
        std::size_t d = 0;
        while (d < m && ++ix[d] == prior[d]->size()) ix[d++] = 0;
        if (d == m) break;
    }
}

}  // namespace detail

// Smallest entry fee maximizing E[1{surplus >= e} * (e + beta paid)] over the
// achievable surplus levels of the grid prior (plus 0); expected revenue in e
// is piecewise linear with breakpoints exactly there.
template <class T>
T optimal_entry_fee(const std::vector<const DiscretePmf<T>*>& fee_prior,
                    const BetaProfile<T>& bp) {
    std::vector<std::pair<T, std::pair<T, T>>> quotes;  // (surplus, (beta_paid, w))
    detail::for_each_quote(fee_prior, bp, [&](const T& s, const T& b, const T& w) {
        quotes.emplace_back(s, std::make_pair(b, w));
    });

    std::vector<T> candidates{T(0)};
    for (const auto& q : quotes) candidates.push_back(q.first);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    T best_fee(0), best_rev(-1);
    for (const auto& e : candidates) {
        T rev(0);
        for (const auto& [s, bw] : quotes)
            if (s >= e) rev += bw.second * (e + bw.first);
        if (rev > best_rev) {
            best_rev = rev;
            best_fee = e;
        }
    }
    return best_fee;
}

template <class T>
struct BvcgOutcome {
    std::vector<std::vector<int>> won;  // per player: item indices bought
    std::vector<T> payment;             // per player
    std::vector<T> fee;                 // per player, the fee that was quoted
    T revenue{};
};

// VCG with per-player entry fees: player i wins item j at floor beta_ij; the
// fee is tuned to the grid prior and the opponents' bids only, so the
// mechanism stays DSIC.  A player buys the whole winning set (fee plus
// floors) iff the surplus covers the fee.  Fee computations repeat across
// profiles during enumeration, so callers may pass a cache.
template <class T>
using FeeCache = std::map<std::pair<int, BetaProfile<T>>, T>;

template <class T>
BvcgOutcome<T> bvcg_outcome(int n, int m, const std::vector<T>& bids,
                            const std::vector<DiscretePmf<T>>& fee_priors,
                            FeeCache<T>* cache = nullptr) {
    if (bids.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(m) ||
        fee_priors.size() != bids.size())
        throw std::domain_error("bvcg_outcome: size mismatch");
    BvcgOutcome<T> out;
    out.won.resize(static_cast<std::size_t>(n));
    out.payment.assign(static_cast<std::size_t>(n), T(0));
    out.fee.assign(static_cast<std::size_t>(n), T(0));

    for (int i = 0; i < n; ++i) {
        auto bp = beta_profile(n, m, bids, i);
        std::vector<const DiscretePmf<T>*> prior;
        prior.reserve(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j)
            prior.push_back(&fee_priors[static_cast<std::size_t>(i) * m + j]);

        T e;
        if (cache) {
            auto key = std::make_pair(i, bp);
            auto it = cache->find(key);
            if (it == cache->end()) {
                e = optimal_entry_fee(prior, bp);
                cache->emplace(std::move(key), e);
            } else {
                e = it->second;
            }
        } else {
            e = optimal_entry_fee(prior, bp);
        }
        out.fee[static_cast<std::size_t>(i)] = e;

        T surplus(0), beta_paid(0);
        std::vector<int> items;
        for (int j = 0; j < m; ++j) {
            const T& v = bids[static_cast<std::size_t>(i) * m + j];
            if (detail::takes_item(v, bp.beta[static_cast<std::size_t>(j)],
                                   bp.win_tie[static_cast<std::size_t>(j)])) {
                surplus += v - bp.beta[static_cast<std::size_t>(j)];
                beta_paid += bp.beta[static_cast<std::size_t>(j)];
                items.push_back(j);
            }
        }
        if (surplus >= e) {
            out.won[static_cast<std::size_t>(i)] = std::move(items);
            out.payment[static_cast<std::size_t>(i)] = e + beta_paid;
            out.revenue += out.payment[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

// The Core-lemma fee: r_ij is the best posted-price revenue above the floor
// on the TRUE marginal, b_ij = (v_ij - (1+delta)*beta_ij)^+, c_ij caps b_ij
// at r_i, and e_core = sum E[c_ij] - 2 r_i (clamped at zero).  The quoted fee
// is e_core/(1+delta).  Both acceptance probabilities are exact.
template <class T>
struct CoreFeeReport {
    T r_i{};
    T e_core{};
    T e_prime{};
    T accept_true{};  // Pr_D[sum_j b_ij >= e_core]
    T accept_grid{};  // Pr_D'[sum_j (v'_ij - beta_ij)^+ >= e_prime]
};

template <class T>
CoreFeeReport<T> entry_fee_core(const std::vector<const DiscretePmf<T>*>& true_prior,
                                const std::vector<const DiscretePmf<T>*>& grid_prior,
                                const BetaProfile<T>& bp, const T& delta) {
    const std::size_t m = true_prior.size();
    CoreFeeReport<T> rep;
    for (std::size_t j = 0; j < m; ++j)
        rep.r_i += optimal_posted_price(*true_prior[j], bp.beta[j]).revenue;

    const T one_plus = T(1) + delta;
    auto b_of = [&](std::size_t j, const T& v) {
        T b = v - one_plus * bp.beta[j];
        return b > T(0) ? b : T(0);
    };

    T sum_ec(0);
    for (std::size_t j = 0; j < m; ++j) {
        T ec(0);
        for (std::size_t l = 0; l < true_prior[j]->size(); ++l) {
            T b = b_of(j, true_prior[j]->value(l));
            if (b <= rep.r_i) ec += true_prior[j]->mass(l) * b;
        }
        sum_ec += ec;
    }
    rep.e_core = sum_ec - T(2) * rep.r_i;
    if (rep.e_core < T(0)) rep.e_core = T(0);
    rep.e_prime = rep.e_core / one_plus;

    // Pr_D[sum b_ij >= e_core], full enumeration of the true product prior
    {
        std::vector<std::size_t> ix(m, 0);
        T acc(0);
        for (;;) {
            T w(1), s(0);
            for (std::size_t j = 0; j < m; ++j) {
                w *= true_prior[j]->mass(ix[j]);
                s += b_of(j, true_prior[j]->value(ix[j]));
            }
            if (s >= rep.e_core) acc += w;
            std::size_t d = 0;
            while (d < m && ++ix[d] == true_prior[d]->size()) ix[d++] = 0;
            if (d == m) break;
        }
        rep.accept_true = acc;
    }

    // Pr_D'[surplus >= e_prime] with the mechanism's own surplus rule
    {
        T acc(0);
        detail::for_each_quote(grid_prior, bp, [&](const T& s, const T&, const T& w) {
            if (s >= rep.e_prime) acc += w;
        });
        rep.accept_grid = acc;
    }
    return rep;
}

// Per-item Myerson for additive instances: items sell independently, each by
// the single-item optimal auction on its own column of priors.  Build the
// column tables once, then evaluate per bid profile.
template <class T>
std::vector<std::vector<VirtualTable<T>>> column_tables(int n, int m,
                                                        const std::vector<DiscretePmf<T>>& pmfs) {
    std::vector<std::vector<VirtualTable<T>>> cols(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        cols[static_cast<std::size_t>(j)].reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            cols[static_cast<std::size_t>(j)].push_back(
                build_virtual_table(pmfs[static_cast<std::size_t>(i) * m + j]));
    }
    return cols;
}

template <class T>
T per_item_myerson_payment(const std::vector<std::vector<VirtualTable<T>>>& cols,
                           const std::vector<T>& bids) {
    const int m = static_cast<int>(cols.size());
    T total(0);
    for (int j = 0; j < m; ++j) {
        const auto& ctabs = cols[static_cast<std::size_t>(j)];
        std::vector<T> colbids(ctabs.size());
        for (std::size_t i = 0; i < ctabs.size(); ++i)
            colbids[i] = bids[i * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)];
        auto o = mrs_outcome(ctabs, colbids);
        if (o.winner >= 0) total += o.payment;
    }
    return total;
}

}  // namespace qmech
