// Acceptance suite: one line per criterion, nonzero exit iff any fails.
// Every revenue inequality below is checked in exact arithmetic unless the
// criterion is inherently statistical, in which case a Monte Carlo estimate
// with a 3-sigma allowance is used.

#include "qmech/adversary.hpp"
#include "qmech/continuous.hpp"
#include "qmech/copies.hpp"
#include "qmech/coupling.hpp"
#include "qmech/discretize.hpp"
#include "qmech/distribution.hpp"
#include "qmech/instance.hpp"
#include "qmech/lp.hpp"
#include "qmech/mechanisms.hpp"
#include "qmech/myerson.hpp"
#include "qmech/oracle.hpp"
#include "qmech/quadext.hpp"
#include "qmech/rng.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

using namespace qmech;

namespace {

DiscretePmf<Rat> random_pmf(Rng& rng, long lo, long hi, int max_atoms, long denom) {
    const int k = static_cast<int>(rng.uniform_int(1, max_atoms));
    long total = 0;
    std::vector<long> w(static_cast<std::size_t>(k));
    for (auto& x : w) {
        x = rng.uniform_int(1, denom);
        total += x;
    }
    std::vector<std::pair<Rat, Rat>> atoms;
    for (int i = 0; i < k; ++i)
        atoms.emplace_back(Rat(rng.uniform_int(lo, hi)),
                           Rat(w[static_cast<std::size_t>(i)]) / Rat(total));
    return DiscretePmf<Rat>::from_atoms(std::move(atoms));
}

ValClass class_for(MechKind k) {
    switch (k) {
        case MechKind::EVUD:
        case MechKind::EQUD: return ValClass::UnitDemand;
        case MechKind::EVBVCG:
        case MechKind::EVA:
        case MechKind::EQBVCG:
        case MechKind::EQA: return ValClass::Additive;
        default: return ValClass::SingleItem;
    }
}

Rat rat_pow(const Rat& b, long e) {
    Rat p(1);
    for (long i = 0; i < e; ++i) p *= b;
    return p;
}

Rat max_support_value(const std::vector<DiscretePmf<Rat>>& pmfs) {
    Rat h(1);
    for (const auto& d : pmfs)
        if (d.max_value() > h) h = d.max_value();
    return h;
}

template <class QX>
DiscretePmf<QX> lift_pmf(const DiscretePmf<Rat>& d) {
    std::vector<std::pair<QX, QX>> atoms;
    atoms.reserve(d.size());
    for (std::size_t l = 0; l < d.size(); ++l) atoms.emplace_back(QX(d.value(l)), QX(d.mass(l)));
    return DiscretePmf<QX>::from_atoms(std::move(atoms), false);
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;

template <class F>
void criterion(int id, const char* name, double budget_s, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= budget_s) {
        o.pass = false;
        o.detail += " [over time budget]";
    }
    if (!o.pass) ++g_failures;
    std::printf("[%s] %2d %-36s %6.1fs  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs,
                o.detail.c_str());
    std::fflush(stdout);
}

// 1. Single-item value-grid mechanism: exact revenue within 1+eps of the
// exact optimum on every instance.
Outcome c1_single_item_value() {
    Rng rng(101);
    const std::vector<Rat> eps_list{Rat(1) / 4, Rat(1) / 2, Rat(1)};
    int ok = 0;
    const int total = 200;
    for (int it = 0; it < total; ++it) {
        const int n = 1 + it % 3;
        const Rat eps = eps_list[static_cast<std::size_t>(it) % eps_list.size()];
        std::vector<DiscretePmf<Rat>> pmfs;
        for (int i = 0; i < n; ++i) pmfs.push_back(random_pmf(rng, 1, 16, 6, 16));

        MechSpec spec{MechKind::EVM, eps, max_support_value(pmfs), TailSpec::bounded(), 0, 1};
        std::vector<CountingOracle<PmfSource<Rat>>> oracles;
        oracles.reserve(pmfs.size());
        for (const auto& d : pmfs) oracles.emplace_back(PmfSource<Rat>{&d});
        auto pm = prepare_mechanism(spec, ValClass::SingleItem, n, 1, oracles);

        std::vector<const DiscretePmf<Rat>*> tp;
        for (const auto& d : pmfs) tp.push_back(&d);
        const Rat rev = exact_mechanism_revenue(pm, tp, Branch::Mixture, false);
        const Rat opt = optimal_revenue_single_item(pmfs);
        if (rev * (Rat(1) + eps) >= opt) ++ok;
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " instances"};
}

// 2. Measured oracle counters equal the closed-form query counts.
Outcome c2_query_counts() {
    Rng rng(301);
    const std::vector<MechKind> kinds{MechKind::EVM,    MechKind::EVUD, MechKind::EVBVCG,
                                      MechKind::EVA,    MechKind::EQM,  MechKind::EQUD,
                                      MechKind::EQBVCG, MechKind::EQA,  MechKind::EMR,
                                      MechKind::SM};
    int ok = 0;
    const int total = 50;
    for (int it = 0; it < total; ++it) {
        MechKind kind = kinds[static_cast<std::size_t>(it) % kinds.size()];
        ValClass vc = class_for(kind);
        if (kind == MechKind::SM && it % 20 >= 10) vc = ValClass::Additive;
        const int n = vc == ValClass::SingleItem ? static_cast<int>(rng.uniform_int(1, 3))
                                                 : static_cast<int>(rng.uniform_int(1, 2));
        const int m = vc == ValClass::SingleItem ? 1 : static_cast<int>(rng.uniform_int(1, 2));
        const long hi = rng.uniform_int(2, 32);

        MechSpec spec;
        spec.kind = kind;
        spec.eps = Rat(rng.uniform_int(1, 6)) / Rat(rng.uniform_int(1, 3));
        spec.H = Rat(hi);

        std::vector<DiscretePmf<Rat>> pmfs;
        for (int k = 0; k < n * m; ++k) pmfs.push_back(random_pmf(rng, 1, hi, 4, 8));
        std::vector<Marginal> margs;
        for (const auto& p : pmfs) margs.emplace_back(p);
        std::vector<CountingOracle<MarginalSource>> oracles;
        for (const auto& mg : margs) oracles.emplace_back(MarginalSource(mg));

        auto pm = prepare_mechanism(spec, vc, n, m, oracles);
        auto formula = query_count_formula(spec, vc, n, m);
        std::int64_t got_v = 0, got_q = 0;
        for (const auto& o : oracles) {
            got_v += o.value_queries();
            got_q += o.quantile_queries();
        }
        if (got_v == formula.value && got_q == formula.quantile &&
            pm.queries_value == formula.value && pm.queries_quantile == formula.quantile)
            ++ok;
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " settings"};
}

// 3. Unit-demand mechanism: exact revenue within 6(1+eps) of the exact
// matching relaxation optimum.
Outcome c3_unit_demand() {
    Rng rng(303);
    int ok = 0;
    const int total = 100;
    for (int it = 0; it < total; ++it) {
        const int n = static_cast<int>(rng.uniform_int(1, 3));
        const int m = static_cast<int>(rng.uniform_int(1, 3));
        const Rat eps = it % 2 == 0 ? Rat(1) / 2 : Rat(1);
        std::vector<DiscretePmf<Rat>> pmfs;
        for (int k = 0; k < n * m; ++k) pmfs.push_back(random_pmf(rng, 1, 16, 4, 16));

        MechSpec spec{MechKind::EVUD, eps, max_support_value(pmfs), TailSpec::bounded(), 0, 1};
        std::vector<CountingOracle<PmfSource<Rat>>> oracles;
        oracles.reserve(pmfs.size());
        for (const auto& d : pmfs) oracles.emplace_back(PmfSource<Rat>{&d});
        auto pm = prepare_mechanism(spec, ValClass::UnitDemand, n, m, oracles);

        std::vector<const DiscretePmf<Rat>*> tp;
        for (const auto& d : pmfs) tp.push_back(&d);
        const Rat rev = exact_mechanism_revenue(pm, tp, Branch::Mixture, false);
        const Rat opt_cp = opt_copies(build_copies(pmfs, n, m));
        if (rev * Rat(6) * (Rat(1) + eps) >= opt_cp) ++ok;
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " instances"};
}

// 4. Additive single buyer: the fixed 1/4 entry-fee + 3/4 item-wise mixture
// covers 1/(8(1+eps)) of the exact menu-program optimum.  The grid ratio is
// sqrt(1+eps), so the exact run works in Q(sqrt(1+eps)).
template <class QX>
int c4_run(Rng& rng, const Rat& eps, int count) {
    int ok = 0;
    for (int it = 0; it < count; ++it) {
        std::vector<DiscretePmf<Rat>> pmfs_r{random_pmf(rng, 1, 16, 3, 16),
                                             random_pmf(rng, 1, 16, 3, 16)};
        std::vector<DiscretePmf<QX>> truth;
        for (const auto& d : pmfs_r) truth.push_back(lift_pmf<QX>(d));

        MechSpec spec{MechKind::EVA, eps, max_support_value(pmfs_r), TailSpec::bounded(), 0, 1};
        std::vector<CountingOracle<PmfSource<QX>>> oracles;
        oracles.reserve(truth.size());
        for (const auto& d : truth) oracles.emplace_back(PmfSource<QX>{&d});
        auto pm = prepare_mechanism(spec, ValClass::Additive, 1, 2, oracles);

        std::vector<const DiscretePmf<QX>*> tp{&truth[0], &truth[1]};
        const QX fee = exact_mechanism_revenue(pm, tp, Branch::BvcgBranch, false);
        const QX im = exact_mechanism_revenue(pm, tp, Branch::ImBranch, false);
        auto lp = opt_single_buyer_lp(pmfs_r, ValClass::Additive);

        // 1/4 fee + 3/4 im >= lp / (8(1+eps)), cleared of denominators
        const QX lhs = (fee + QX(3) * im) * QX(2) * QX(Rat(Rat(1) + eps));
        if (lhs >= QX(lp.value)) ++ok;
    }
    return ok;
}

Outcome c4_additive_single_buyer() {
    Rng rng(404);
    int ok = c4_run<QuadExt<3, 2>>(rng, Rat(1) / 2, 50);
    ok += c4_run<QuadExt<2>>(rng, Rat(1), 50);
    return {ok == 100, std::to_string(ok) + "/100 instances"};
}

// 5. Entry-fee core: at the core fee, every player accepts with probability
// at least 1/2 against every opponent profile, under both the true prior and
// the rounded one.  Grids again live in Q(sqrt(1+eps)).
template <class QX>
bool c5_case(Rng& rng, const Rat& eps) {
    const int n = 2, m = 2;
    std::vector<DiscretePmf<Rat>> pmfs_r;
    for (int k = 0; k < n * m; ++k) pmfs_r.push_back(random_pmf(rng, 1, 16, 3, 16));
    std::vector<DiscretePmf<QX>> truth;
    for (const auto& d : pmfs_r) truth.push_back(lift_pmf<QX>(d));

    const QX delta = grid_ratio<QX>(Rat(1) + eps, 2) - QX(1);
    const QX H = QX(max_support_value(pmfs_r));
    std::vector<DiscretePmf<QX>> grid;
    grid.reserve(truth.size());
    for (const auto& d : truth) {
        CountingOracle<PmfSource<QX>> o{PmfSource<QX>{&d}};
        grid.push_back(discretize_value(o, H, delta).pmf);
    }

    const QX half = QX(Rat(1) / 2);
    for (int i = 0; i < n; ++i) {
        std::vector<const DiscretePmf<QX>*> tp, gp;
        for (int j = 0; j < m; ++j) {
            tp.push_back(&truth[static_cast<std::size_t>(i) * m + j]);
            gp.push_back(&grid[static_cast<std::size_t>(i) * m + j]);
        }
        std::vector<const DiscretePmf<QX>*> opp;
        for (int o = 0; o < n; ++o)
            if (o != i)
                for (int j = 0; j < m; ++j)
                    opp.push_back(&truth[static_cast<std::size_t>(o) * m + j]);

        std::vector<std::size_t> ix(opp.size(), 0);
        for (;;) {
            std::vector<QX> bids(static_cast<std::size_t>(n * m), QX(0));
            std::size_t c = 0;
            for (int o = 0; o < n; ++o)
                if (o != i)
                    for (int j = 0; j < m; ++j) {
                        bids[static_cast<std::size_t>(o) * m + j] = opp[c]->value(ix[c]);
                        ++c;
                    }
            auto bp = beta_profile(n, m, bids, i);
            auto rep = entry_fee_core(tp, gp, bp, delta);
            if (!(rep.accept_true >= half) || !(rep.accept_grid >= half)) return false;
            std::size_t d = 0;
            while (d < opp.size() && ++ix[d] == opp[d]->size()) ix[d++] = 0;
            if (d == opp.size()) break;
        }
    }
    return true;
}

Outcome c5_core_fee_acceptance() {
    Rng rng(505);
    int ok = 0;
    for (int it = 0; it < 50; ++it)
        if (c5_case<QuadExt<3, 2>>(rng, Rat(1) / 2)) ++ok;
    for (int it = 0; it < 50; ++it)
        if (c5_case<QuadExt<2>>(rng, Rat(1))) ++ok;
    return {ok == 100, std::to_string(ok) + "/100 instances, all (player, profile) pairs"};
}

// 6. Quantile single-item mechanism on bounded supports: exact revenue within
// 1+eps of the true optimum, and the resampling-coupled shadow run never
// beats the deployed auction.
Outcome c6_quantile_single_item() {
    Rng rng(606);
    int ok = 0;
    const int total = 100;
    for (int it = 0; it < total; ++it) {
        const int n = static_cast<int>(rng.uniform_int(1, 2));
        const Rat eps = it % 2 == 0 ? Rat(1) / 2 : Rat(1);
        std::vector<DiscretePmf<Rat>> pmfs;
        for (int i = 0; i < n; ++i) pmfs.push_back(random_pmf(rng, 1, 16, 5, 16));

        MechSpec spec{MechKind::EQM, eps, max_support_value(pmfs), TailSpec::bounded(), 0, 1};
        std::vector<CountingOracle<PmfSource<Rat>>> oracles;
        oracles.reserve(pmfs.size());
        for (const auto& d : pmfs) oracles.emplace_back(PmfSource<Rat>{&d});
        auto pm = prepare_mechanism(spec, ValClass::SingleItem, n, 1, oracles);

        std::vector<const DiscretePmf<Rat>*> tp, rp;
        for (const auto& d : pmfs) tp.push_back(&d);
        for (const auto& d : pm.prior) rp.push_back(&d);

        const Rat rev = exact_mechanism_revenue(pm, tp, Branch::Mixture, false);
        const Rat opt = optimal_revenue_single_item(pmfs);
        const Rat shadow = m_star_revenue(tp, rp);
        if (rev * (Rat(1) + eps) >= opt && shadow <= rev) ++ok;
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " instances"};
}

// 7. Regular continuous distributions, Monte Carlo: revenue within 1+eps of
// the known posted-price optimum up to three standard errors.
Outcome c7_regular_mc() {
    struct Case {
        Marginal marg;
        double opt;
        const char* label;
        std::uint64_t seed;
    };
    const std::vector<Case> cases{
        {Marginal(ContinuousDist{UniformDist{0.0, 1.0}}), 0.25, "uniform", 515151},
        {Marginal(ContinuousDist{ExponentialDist{1.0, 1e-6}}), std::exp(-1.0), "exponential",
         626262},
    };
    const Rat eps = Rat(1) / 2;
    std::string detail;
    bool pass = true;
    for (const auto& c : cases) {
        MechSpec spec{MechKind::EMR, eps, Rat(1), TailSpec::bounded(), 0, 1};
        std::vector<CountingOracle<MarginalSource>> oracles;
        oracles.emplace_back(MarginalSource(c.marg));
        auto pm = prepare_mechanism(spec, ValClass::SingleItem, 1, 1, oracles);
        auto mc = mc_mechanism_revenue(pm, {c.marg}, 1000000, c.seed);
        const double need = c.opt / 1.5 - 3 * mc.se;
        if (!(mc.mean >= need)) pass = false;
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s rev %.4f vs %.4f  ", c.label, mc.mean, need);
        detail += buf;
    }
    return {pass, detail};
}

// 8. Indistinguishable-family lower bound at c = 2 and the smallest H.
Outcome c8_lower_bound_family() {
    const Rat H = irregular_min_H(2);
    if (H != rat_pow(Rat(2), 160)) return {false, "unexpected smallest H"};
    auto f = gen_irregular_family(2, H);

    // mass and ordering invariants
    if (f.members != 8 || f.k != 1 || f.delta != Rat(1) / H) return {false, "family shape"};
    for (std::size_t i = 0; i + 1 < f.u.size(); ++i)
        if (!(f.u[i] < f.u[i + 1])) return {false, "u chain not ascending"};
    for (std::size_t i = 0; i + 1 < f.q.size(); ++i)
        if (!(f.q[i] < f.q[i + 1])) return {false, "q chain not ascending"};
    if (f.u.back() != H || f.q.back() != Rat(1)) return {false, "chain endpoints"};
    if (!(rat_pow(f.q[0], 4) * H >= Rat(1)) || !(rat_pow(f.u[0], 4) >= rat_pow(H, 3)) ||
        !(rat_pow(f.u[0] * f.q[0], 2) >= H))
        return {false, "chain separation"};
    for (int z = 1; z <= f.members; ++z) {
        const auto& d = f.dists[static_cast<std::size_t>(z) - 1];
        if (d.total() != Rat(1)) return {false, "member mass"};
        const Rat mid = rat_pow(Rat(8), z) * f.u[0];
        if (!(mid > f.u[0] && mid < f.u[1])) return {false, "hidden atom outside interval"};
    }

    // closed-form optimum equals full price enumeration (0 relative error)
    for (int z = 1; z <= f.members; ++z) {
        const auto& d = f.dists[static_cast<std::size_t>(z) - 1];
        Rat best(0);
        for (const auto& v : d.values()) {
            const Rat r = v * d.ccdf(v);
            if (r > best) best = r;
        }
        if (best != f.opt_closed(z)) return {false, "closed-form optimum mismatch"};
    }

    // 1000 legal queries: members answer identically outside the hidden pair
    std::vector<Rat> vqs, qqs;
    for (int i = 0; i < 500; ++i) {
        const long e = (static_cast<long>(i) * 160) / 499;
        Rat v = rat_pow(Rat(2), e) + Rat(i % 8);
        if (v > H) v = H;
        vqs.push_back(v);
    }
    for (int i = 1; i <= 250; ++i) qqs.push_back(Rat(i) / 250);
    for (int j = 0; j < 250; ++j) qqs.push_back(Rat(1) / rat_pow(Rat(2), 41 + (j % 20)));
    auto chk = answers_equal_outside(f, vqs, qqs);
    if (!chk.equal_outside || !chk.value_mismatch.empty() || !chk.quantile_mismatch.empty())
        return {false, "answers differ outside the hidden intervals"};
    if (chk.value_inside.empty()) return {false, "grid never probed the hidden interval"};

    // the adversary holds both a probing plan and a budget-starved one below
    // half of the optimum
    auto pick = adversarial_pick(2, H, {rat_pow(Rat(2), 135), rat_pow(Rat(2), 10)},
                                 {Rat(1) / 2, Rat(1) / rat_pow(Rat(2), 50)});
    if (!pick.budget_sufficient || !(pick.ratio < Rat(1) / 2) || !(pick.ratio > Rat(0)))
        return {false, "probed plan not beaten"};
    if (pick.mech_revenue != pick.ratio * pick.opt) return {false, "ratio bookkeeping"};

    const Rat bigH = rat_pow(Rat(2), 320);
    auto starved = adversarial_pick(2, bigH, {rat_pow(Rat(2), 300)}, {});
    if (starved.budget_sufficient || !(starved.ratio < Rat(1) / 2))
        return {false, "starved plan not beaten"};

    char buf[96];
    std::snprintf(buf, sizeof buf, "8 members, ratios %.4f / %.4f",
                  scalar_traits<Rat>::to_double(pick.ratio),
                  scalar_traits<Rat>::to_double(starved.ratio));
    return {true, buf};
}

// 9. Regular hard pair: valid regular cdfs, closed-form optima, pointwise
// agreement outside the hidden quantile window.
Outcome c9_regular_pair() {
    auto rp = gen_regular_pair(Rat(1) / 128, Rat(1), 1);
    const auto& c1 = rp.d1.continuous();
    const auto& c2 = rp.d2.continuous();

    if (rp.q_t != Rat(1) / 4 || rp.q_t1 != Rat(1) / 2 || rp.opt1 != Rat(4) / 3 ||
        rp.opt2 != Rat(7) / 6)
        return {false, "closed-form parameters"};

    // cdf validity: ccdf in [0,1], nonincreasing, full mass at 0, none past top
    for (const auto* c : {&c1, &c2}) {
        double prev = 1.0;
        if (std::abs(ccdf(*c, 0.0) - 1.0) > 1e-12) return {false, "ccdf(0) != 1"};
        for (int i = 0; i <= 4200; ++i) {
            const double v = 4.2 * i / 4200.0;
            const double p = ccdf(*c, v);
            if (p < -1e-15 || p > 1.0 + 1e-15) return {false, "ccdf out of range"};
            if (p > prev + 1e-12) return {false, "ccdf not monotone"};
            prev = p;
        }
        if (ccdf(*c, 4.0 + 1e-9) != 0.0) return {false, "mass beyond the top"};
    }
    if (!revenue_curve_regularity(rp.d1, 400).is_regular ||
        !revenue_curve_regularity(rp.d2, 400).is_regular)
        return {false, "revenue curve not concave"};

    // closed forms against numeric price optimization
    auto p1 = optimal_posted_price(c1, 0.0);
    auto p2 = optimal_posted_price(c2, 0.0);
    if (std::abs(p1.revenue - 4.0 / 3.0) > 1e-9 || std::abs(p2.revenue - 7.0 / 6.0) > 1e-9)
        return {false, "numeric optimum mismatch"};

    // agreement outside (q_t, q_t1): identical ccdf below v*, identical
    // quantile answers outside the window
    for (int i = 0; i <= 280; ++i) {
        const double v = 2.8 * i / 280.0;
        if (std::abs(ccdf(c1, v) - ccdf(c2, v)) > 1e-12) return {false, "ccdf disagreement"};
    }
    for (int i = 1; i <= 100; ++i) {
        const double q_lo = 0.25 * i / 101.0;
        const double q_hi = 0.5 + 0.5 * i / 100.0;
        auto a_lo1 = quantile(c1, q_lo), a_lo2 = quantile(c2, q_lo);
        auto a_hi1 = quantile(c1, q_hi), a_hi2 = quantile(c2, q_hi);
        if (a_lo1.infinite || a_lo2.infinite) return {false, "infinite quantile"};
        if (std::abs(a_lo1.value - a_lo2.value) > 1e-12 ||
            std::abs(a_hi1.value - a_hi2.value) > 1e-12)
            return {false, "quantile disagreement outside window"};
    }
    // and a genuine difference inside
    if (std::abs(quantile(c1, 0.4).value - quantile(c2, 0.4).value) < 1e-6)
        return {false, "pair does not differ inside the window"};
    return {true, "optima 4/3 and 7/6 confirmed"};
}

// 10. Coupling kernels: round-down pushes the source onto the rounded prior,
// resampling pushes the rounded prior back, entrywise exact.
Outcome c10_coupling() {
    Rng rng(1010);
    int ok = 0;
    const int total = 50;
    for (int it = 0; it < total; ++it) {
        const long hi = rng.uniform_int(2, 64);
        auto src = random_pmf(rng, 1, hi, 7, 12);
        const Rat delta = Rat(rng.uniform_int(1, 6)) / Rat(rng.uniform_int(1, 3));
        const Rat eps1 = Rat(1) / rng.uniform_int(2, 24);
        CountingOracle<PmfSource<Rat>> o{PmfSource<Rat>{&src}};
        auto disc = discretize_quantile(o, delta, eps1);

        auto down = round_down_matrix(src, disc.pmf);
        auto resample = resample_matrix(src, disc.pmf);
        const bool down_ok = down.pushforward(src).values() == disc.pmf.values() &&
                             down.pushforward(src).masses() == disc.pmf.masses();
        const bool up_ok = resample.pushforward(disc.pmf).values() == src.values() &&
                           resample.pushforward(disc.pmf).masses() == src.masses();
        if (down_ok && up_ok) ++ok;
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " sources"};
}

// 11. Sample-based mechanism: the empirical grid tracks the true quantiles
// and the Monte Carlo revenue clears the 1/(1+eps) threshold.
Outcome c11_sample_mechanism() {
    Rng srng(20260815);
    std::vector<double> samples(100000);
    for (auto& s : samples) s = srng.uniform01();

    MechSpec spec{MechKind::SM, Rat(1), Rat(1), TailSpec::bounded(), 100000, 1};
    std::vector<CountingOracle<MarginalSource>> oracles;
    oracles.emplace_back(MarginalSource::empirical(samples));
    auto pm = prepare_mechanism(spec, ValClass::SingleItem, 1, 1, oracles);

    // the grid the mechanism queried, re-derived and re-asked
    const double ratio = from_rat<double>(pm.dp.base);
    const double eps1 = from_rat<double>(pm.dp.eps1);
    auto grid_q = quantile_grid_geometric<double>(ratio, eps1, pm.dp.k);
    auto probe = MarginalSource::empirical(samples);
    double worst = 0;
    for (const double q : grid_q) {
        const double got = probe.quantile_query(q).value;
        const double want = 1.0 - q;  // uniform[0,1] quantile answer
        worst = std::max(worst, std::abs(got - want));
    }
    if (worst > 0.02) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "grid deviation %.4f exceeds 0.02", worst);
        return {false, buf};
    }

    Marginal uni{ContinuousDist{UniformDist{0.0, 1.0}}};
    auto mc = mc_mechanism_revenue(pm, {uni}, 1000000, 111);
    const double need = 0.25 / 2.0 - 3 * mc.se;
    char buf[128];
    std::snprintf(buf, sizeof buf, "grid dev %.4f, rev %.4f vs %.4f", worst, mc.mean, need);
    return {mc.mean >= need, buf};
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion(1, "single-item value-grid ratio", 120, c1_single_item_value);
    criterion(2, "query counters match closed forms", 10, c2_query_counts);
    criterion(3, "unit-demand ratio vs matching bound", 300, c3_unit_demand);
    criterion(4, "additive single-buyer mixture ratio", 300, c4_additive_single_buyer);
    criterion(5, "entry-fee core acceptance", 120, c5_core_fee_acceptance);
    criterion(6, "quantile single-item ratio + shadow", 180, c6_quantile_single_item);
    criterion(7, "regular continuous Monte Carlo", 60, c7_regular_mc);
    criterion(8, "indistinguishable family lower bound", 60, c8_lower_bound_family);
    criterion(9, "regular hard pair", 30, c9_regular_pair);
    criterion(10, "coupling kernel pushforwards", 30, c10_coupling);
    criterion(11, "sample-based mechanism consistency", 120, c11_sample_mechanism);

    if (g_failures == 0)
        std::printf("all 11 criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
