#pragma once

#include "qmech/pmf.hpp"
#include "qmech/scalar.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qmech {

// Ironed virtual values of a discrete prior: slopes of the upper concave
// envelope of the revenue curve {(q_l, v_l * q_l)} in quantile space, one
// slope per support atom.  Nondecreasing in the value by construction.
template <class T>
struct VirtualTable {
    DiscretePmf<T> prior;
    std::vector<T> raw;     // v_l - (v_{l+1} - v_l) * q_{l+1} / f_l
    std::vector<T> ironed;  // envelope slope across the atom's quantile span

    std::optional<std::size_t> project(const T& bid) const {
        return prior.index_at_or_below(bid);
    }
};

template <class T>
VirtualTable<T> build_virtual_table(DiscretePmf<T> prior) {
    VirtualTable<T> t;
    const std::size_t n = prior.size();
    t.raw.resize(n);
    t.ironed.resize(n);

    // revenue curve points, quantile-ascending: (0,0) then top value first
    std::vector<std::pair<T, T>> pts;
    pts.reserve(n + 1);
    pts.emplace_back(T(0), T(0));
    for (std::size_t l = n; l-- > 0;) {
        const T q = prior.ccdf_at(l);
        pts.emplace_back(q, prior.value(l) * q);
    }

    // upper hull, monotone-chain; exact cross test, x strictly increasing
    std::vector<std::pair<T, T>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            // keep b only if slope(a,b) > slope(b,p)
            if ((b.second - a.second) * (p.first - b.first) <=
                (p.second - b.second) * (b.first - a.first))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }

    auto envelope = [&](const T& x) -> T {
        std::size_t lo = 0, hi = hull.size() - 1;
        while (lo + 1 < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (hull[mid].first <= x)
                lo = mid;
            else
                hi = mid;
        }
        const auto& a = hull[lo];
        const auto& b = hull[hi];
        if (b.first == a.first) return a.second;
        return a.second + (b.second - a.second) * (x - a.first) / (b.first - a.first);
    };

    for (std::size_t l = 0; l < n; ++l) {
        const T q_hi = prior.ccdf_at(l);                              // Pr[X >= v_l]
        const T q_lo = (l + 1 < n) ? prior.ccdf_at(l + 1) : T(0);     // Pr[X >= v_{l+1}]
        const T f = prior.mass(l);
        const T v = prior.value(l);
        const T v_next_term = (l + 1 < n) ? (prior.value(l + 1) - v) * q_lo / f : T(0);
        t.raw[l] = v - v_next_term;
        t.ironed[l] = (envelope(q_hi) - envelope(q_lo)) / f;
    }
    t.prior = std::move(prior);
    return t;
}

template <class T>
struct SingleItemOutcome {
    int winner = -1;  // -1: item unsold
    T payment{};
};

namespace detail {

// wins(i, phi_i) vs fixed opponents: strict beat needed against lower-indexed
// players, ties win against higher-indexed ones.
template <class T>
bool wins_item(std::size_t i, const T& phi,
               const std::vector<std::optional<T>>& opponents) {
    if (phi < T(0)) return false;
    for (std::size_t j = 0; j < opponents.size(); ++j) {
        if (j == i || !opponents[j]) continue;
        if (j < i ? !(phi > *opponents[j]) : !(phi >= *opponents[j])) return false;
    }
    return true;
}

}  // namespace detail

// Allocation: highest nonnegative ironed virtual value, lexicographic
// tie-break.  Winner pays his threshold bid: the smallest support value at
// which he still wins.
template <class T>
SingleItemOutcome<T> mrs_outcome(const std::vector<VirtualTable<T>>& tabs,
                                 const std::vector<T>& bids) {
    const std::size_t n = tabs.size();
    if (bids.size() != n) throw std::domain_error("mrs_outcome: bid count mismatch");

    std::vector<std::optional<T>> phi(n);
    std::vector<std::optional<std::size_t>> idx(n);
    for (std::size_t i = 0; i < n; ++i) {
        idx[i] = tabs[i].project(bids[i]);
        if (idx[i]) phi[i] = tabs[i].ironed[*idx[i]];
    }

    SingleItemOutcome<T> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!phi[i] || !detail::wins_item(i, *phi[i], phi)) continue;
        // threshold: scan this player's support upward, others fixed
        for (std::size_t m = 0; m <= *idx[i]; ++m) {
            if (detail::wins_item(i, tabs[i].ironed[m], phi)) {
                out.winner = static_cast<int>(i);
                out.payment = tabs[i].prior.value(m);
                return out;
            }
        }
        throw std::logic_error("mrs_outcome: winner without threshold");
    }
    return out;
}

// Visits every profile of the product distribution; f(values, weight).
template <class T, class F>
void for_each_profile(const std::vector<DiscretePmf<T>>& priors, F&& f) {
    const std::size_t n = priors.size();
    std::vector<std::size_t> ix(n, 0);
    std::vector<T> vals(n);
    for (;;) {
        T w(1);
        for (std::size_t i = 0; i < n; ++i) {
            vals[i] = priors[i].value(ix[i]);
            w *= priors[i].mass(ix[i]);
        }
        f(vals, w);
        std::size_t d = 0;
        while (d < n && ++ix[d] == priors[d].size()) ix[d++] = 0;
        if (d == n) break;
    }
}

// Exact expected revenue of the optimal single-item auction, by enumerating
// threshold payments over the profile space.
template <class T>
T optimal_revenue_single_item(const std::vector<DiscretePmf<T>>& priors) {
    std::vector<VirtualTable<T>> tabs;
    tabs.reserve(priors.size());
    for (const auto& d : priors) tabs.push_back(build_virtual_table(d));
    T rev(0);
    for_each_profile(priors, [&](const std::vector<T>& vals, const T& w) {
        auto o = mrs_outcome(tabs, vals);
        if (o.winner >= 0) rev += w * o.payment;
    });
    return rev;
}

// Same quantity through the ironed-virtual-surplus identity
// E[max(0, max_i phi_i(v_i))]; equals the enumeration exactly.
template <class T>
T ironed_surplus_bound(const std::vector<DiscretePmf<T>>& priors) {
    std::vector<VirtualTable<T>> tabs;
    tabs.reserve(priors.size());
    for (const auto& d : priors) tabs.push_back(build_virtual_table(d));
    T rev(0);
    for_each_profile(priors, [&](const std::vector<T>& vals, const T& w) {
        T best(0);
        for (std::size_t i = 0; i < tabs.size(); ++i) {
            auto l = tabs[i].project(vals[i]);
            if (l && tabs[i].ironed[*l] > best) best = tabs[i].ironed[*l];
        }
        rev += w * best;
    });
    return rev;
}

template <class T>
struct PostedPrice {
    T price{};
    T revenue{};
};

// max over prices p >= floor of p * Pr[X >= p]; candidates are the floor and
// the support values above it.  Smallest maximizer on ties, so iterate in
// ascending price order with a strict improvement test.
template <class T>
PostedPrice<T> optimal_posted_price(const DiscretePmf<T>& d, const T& floor) {
    PostedPrice<T> best{floor, floor * d.ccdf(floor)};
    for (std::size_t l = 0; l < d.size(); ++l) {
        const T& p = d.value(l);
        if (p < floor) continue;
        T rev = p * d.ccdf_at(l);
        if (rev > best.revenue) best = {p, rev};
    }
    return best;
}

}  // namespace qmech
