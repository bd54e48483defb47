#pragma once

#include "qmech/distribution.hpp"
#include "qmech/instance.hpp"
#include "qmech/pmf.hpp"
#include "qmech/scalar.hpp"

#include <vector>

namespace qmech {

// Family of irregular single-item distributions that return identical oracle
// answers outside one hidden value interval (u_s, u_{s+1}) and one hidden
// quantile interval (q_t, q_{t+1}).  The member index z only moves the large
// middle atom inside the hidden value interval, so a mechanism that never
// probes inside the hidden intervals cannot tell members apart.
struct IrregularFamily {
    double c = 2;  // target hardness: best uninformed ratio falls below 1/c
    Rat H{};
    long k = 0;    // interval indices run over 0..k-1
    int s = 0, t = 0;
    int members = 0;
    Rat delta{};   // 1/H
    std::vector<Rat> u;  // u_0..u_k ascending, u_k = H
    std::vector<Rat> q;  // q_0..q_k ascending, q_k = 1
    std::vector<DiscretePmf<Rat>> dists;  // member z lives at index z-1
    double hardness_constant = 0;

    Rat opt_closed(int z) const;
    Rat posted_revenue(int z, const Rat& price) const;
};

// Largest usable interval count for the given parameters; the family needs
// at least 1.
long irregular_max_k(double c, const Rat& H);
// Smallest H with irregular_max_k >= 1.
Rat irregular_min_H(double c);

IrregularFamily gen_irregular_family(double c, const Rat& H, int s, int t);
// Default hidden intervals: the middle pair.
IrregularFamily gen_irregular_family(double c, const Rat& H);

struct AnswerCheck {
    bool equal_outside = true;
    std::vector<Rat> value_inside, quantile_inside;
    std::vector<Rat> value_mismatch, quantile_mismatch;
};

// Verifies that all members answer identically on every query outside the
// hidden intervals; queries inside are reported separately.
AnswerCheck answers_equal_outside(const IrregularFamily& f, const std::vector<Rat>& value_qs,
                                  const std::vector<Rat>& quantile_qs);

struct AdversaryPick {
    int s = 0, t = 0;
    bool budget_sufficient = false;
    int z = 1;
    Rat price{};
    Rat mech_revenue{};
    Rat opt{};
    Rat ratio{};
};

// Plays the adversary against a mechanism that revealed its (non-adaptive)
// query lists: hides the family in the least-probed intervals, lets the
// mechanism best-respond with the revenue-maximizing single posted price
// under the uniform posterior over members, then picks the member that makes
// that price look worst.  budget_sufficient reports that every interval on
// one of the two axes was probed.
AdversaryPick adversarial_pick(double c, const Rat& H, const std::vector<Rat>& value_qs,
                               const std::vector<Rat>& quantile_qs);

// Plants d at cell (i_star, j_star) of an n x m instance whose remaining
// marginals are point masses at 1, lifting single-item hardness to multi
// buyer/item settings.
AuctionInstance embed_multi_item(int n, int m, int i_star, int j_star, const Marginal& d,
                                 ValClass vc);

// Pair of regular continuous distributions that agree outside one quantile
// interval yet need different prices for near-optimal revenue.
struct RegularPair {
    Rat eps{}, R{};
    int t = 1;
    Rat delta_eps{}, q_t{}, q_t1{};
    Rat vstar{}, qstar{};
    Rat opt1{}, opt2{};
    Marginal d1, d2;
};

RegularPair gen_regular_pair(const Rat& eps, const Rat& R, int t);

}  // namespace qmech
