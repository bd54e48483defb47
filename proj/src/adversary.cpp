#include "qmech/adversary.hpp"

#include "qmech/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qmech {

namespace {

// The chains divide cleanly only when 4c is an integer, which keeps every
// grid point and mass an exact rational; other c are rejected.
long four_c_int(double c) {
    if (!(c > 1)) throw std::domain_error("irregular family: c must exceed 1");
    double p4 = 4.0 * c;
    long r = std::lround(p4);
    if (std::abs(p4 - static_cast<double>(r)) > 1e-9)
        throw std::domain_error("irregular family: 4c must be an integer");
    return r;
}

Rat pow_rat(const Rat& b, long e) {
    Rat p(1);
    for (long i = 0; i < e; ++i) p *= b;
    return p;
}

struct Chains {
    long p4 = 8;          // 4c
    Rat base_u, base_q;   // (4c)^(4c+2), (8c)^(4c+2)
    long k = 0;
    std::vector<Rat> u, q;
};

Chains build_chains(double c, const Rat& H) {
    Chains ch;
    ch.p4 = four_c_int(c);
    ch.base_u = pow_rat(Rat(ch.p4), ch.p4 + 2);
    ch.base_q = pow_rat(Rat(2 * ch.p4), ch.p4 + 2);

    // largest k with base_q^(4k) <= H
    long k = 0;
    Rat p = pow_rat(ch.base_q, 4);
    Rat acc = p;
    while (acc <= H) {
        ++k;
        acc *= p;
    }
    ch.k = k;
    if (k < 1) return ch;

    ch.u.resize(static_cast<std::size_t>(k) + 1);
    ch.q.resize(static_cast<std::size_t>(k) + 1);
    ch.u[static_cast<std::size_t>(k)] = H;
    ch.q[static_cast<std::size_t>(k)] = Rat(1);
    for (long l = k; l-- > 0;) {
        ch.u[static_cast<std::size_t>(l)] = ch.u[static_cast<std::size_t>(l) + 1] / ch.base_u;
        ch.q[static_cast<std::size_t>(l)] = ch.q[static_cast<std::size_t>(l) + 1] / ch.base_q;
    }
    return ch;
}

Chains required_chains(double c, const Rat& H) {
    auto ch = build_chains(c, H);
    if (ch.k < 1)
        throw std::domain_error("irregular family: H too small, needs H >= " +
                                format_rational(pow_rat(ch.base_q, 4)));
    return ch;
}

}  // namespace

long irregular_max_k(double c, const Rat& H) { return build_chains(c, H).k; }

Rat irregular_min_H(double c) {
    long p4 = four_c_int(c);
    return pow_rat(pow_rat(Rat(2 * p4), p4 + 2), 4);
}

Rat IrregularFamily::opt_closed(int z) const {
    return pow_rat(Rat(4) * Rat(c), z) * u[static_cast<std::size_t>(s)] *
           (q[static_cast<std::size_t>(t) + 1] - delta);
}

Rat IrregularFamily::posted_revenue(int z, const Rat& price) const {
    return price * dists[static_cast<std::size_t>(z) - 1].ccdf(price);
}

IrregularFamily gen_irregular_family(double c, const Rat& H, int s, int t) {
    auto ch = required_chains(c, H);
    if (s < 0 || s >= ch.k || t < 0 || t >= ch.k)
        throw std::domain_error("irregular family: interval index out of range");

    IrregularFamily f;
    f.c = c;
    f.H = H;
    f.k = ch.k;
    f.s = s;
    f.t = t;
    f.members = static_cast<int>(ch.p4);
    f.delta = Rat(1) / H;
    f.u = std::move(ch.u);
    f.q = std::move(ch.q);

    const Rat& us = f.u[static_cast<std::size_t>(s)];
    const Rat& us1 = f.u[static_cast<std::size_t>(s) + 1];
    const Rat& qt = f.q[static_cast<std::size_t>(t)];
    const Rat& qt1 = f.q[static_cast<std::size_t>(t) + 1];
    const Rat mid_mass = qt1 - qt - Rat(2) * f.delta;
    if (mid_mass < 0)
        throw std::domain_error("irregular family: hidden quantile interval thinner than 2/H");

    const Rat fourc = Rat(4) * Rat(c);
    f.dists.reserve(static_cast<std::size_t>(f.members));
    for (int z = 1; z <= f.members; ++z) {
        std::vector<std::pair<Rat, Rat>> atoms{{Rat(1), Rat(1) - qt1},
                                               {us, f.delta},
                                               {pow_rat(fourc, z) * us, mid_mass},
                                               {us1, qt + f.delta}};
        f.dists.push_back(DiscretePmf<Rat>::from_atoms(std::move(atoms)));
    }

    double cd = c;
    f.hardness_constant =
        1.0 / (16.0 * cd * (4.0 * cd + 2.0) * (std::log(8.0 * cd) / std::log(cd)));
    return f;
}

IrregularFamily gen_irregular_family(double c, const Rat& H) {
    auto ch = required_chains(c, H);
    int mid = static_cast<int>((ch.k - 1) / 2);
    return gen_irregular_family(c, H, mid, mid);
}

AnswerCheck answers_equal_outside(const IrregularFamily& f, const std::vector<Rat>& value_qs,
                                  const std::vector<Rat>& quantile_qs) {
    AnswerCheck out;
    const Rat& us = f.u[static_cast<std::size_t>(f.s)];
    const Rat& us1 = f.u[static_cast<std::size_t>(f.s) + 1];
    const Rat& qt = f.q[static_cast<std::size_t>(f.t)];
    const Rat& qt1 = f.q[static_cast<std::size_t>(f.t) + 1];

    for (const auto& v : value_qs) {
        if (v > us && v < us1) {
            out.value_inside.push_back(v);
            continue;
        }
        Rat first = f.dists.front().ccdf(v);
        for (const auto& d : f.dists) {
            if (d.ccdf(v) != first) {
                out.value_mismatch.push_back(v);
                out.equal_outside = false;
                break;
            }
        }
    }
    for (const auto& qq : quantile_qs) {
        if (qq > qt && qq < qt1) {
            out.quantile_inside.push_back(qq);
            continue;
        }
        auto first = f.dists.front().quantile(qq);
        for (const auto& d : f.dists) {
            auto a = d.quantile(qq);
            if (a.infinite != first.infinite || (!a.infinite && a.value != first.value)) {
                out.quantile_mismatch.push_back(qq);
                out.equal_outside = false;
                break;
            }
        }
    }
    return out;
}

AdversaryPick adversarial_pick(double c, const Rat& H, const std::vector<Rat>& value_qs,
                               const std::vector<Rat>& quantile_qs) {
    auto ch = required_chains(c, H);

    std::vector<long> vcount(static_cast<std::size_t>(ch.k), 0);
    std::vector<long> qcount(static_cast<std::size_t>(ch.k), 0);
    for (const auto& v : value_qs)
        for (long l = 0; l < ch.k; ++l)
            if (v > ch.u[static_cast<std::size_t>(l)] && v < ch.u[static_cast<std::size_t>(l) + 1])
                ++vcount[static_cast<std::size_t>(l)];
    for (const auto& qq : quantile_qs)
        for (long l = 0; l < ch.k; ++l)
            if (qq > ch.q[static_cast<std::size_t>(l)] &&
                qq < ch.q[static_cast<std::size_t>(l) + 1])
                ++qcount[static_cast<std::size_t>(l)];

    auto argmin = [](const std::vector<long>& xs) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (xs[i] < xs[best]) best = i;
        return best;
    };
    std::size_t s_star = argmin(vcount);
    std::size_t t_star = argmin(qcount);

    AdversaryPick pick;
    pick.s = static_cast<int>(s_star);
    pick.t = static_cast<int>(t_star);
    pick.budget_sufficient = vcount[s_star] > 0 || qcount[t_star] > 0;

    auto f = gen_irregular_family(c, H, pick.s, pick.t);

    // Best response: the single posted price maximizing average revenue over
    // the uniform posterior; the candidate set covers every support value.
    std::vector<Rat> cands{Rat(1), f.u[static_cast<std::size_t>(pick.s)],
                           f.u[static_cast<std::size_t>(pick.s) + 1]};
    const Rat fourc = Rat(4) * Rat(c);
    for (int z = 1; z <= f.members; ++z)
        cands.push_back(pow_rat(fourc, z) * f.u[static_cast<std::size_t>(pick.s)]);
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    bool have = false;
    Rat best_total(0);
    for (const auto& p : cands) {
        Rat tot(0);
        for (int z = 1; z <= f.members; ++z) tot += f.posted_revenue(z, p);
        if (!have || tot > best_total) {
            have = true;
            best_total = tot;
            pick.price = p;
        }
    }

    bool havez = false;
    for (int z = 1; z <= f.members; ++z) {
        Rat rev = f.posted_revenue(z, pick.price);
        Rat opt = f.opt_closed(z);
        Rat ratio = rev / opt;
        if (!havez || ratio < pick.ratio) {
            havez = true;
            pick.z = z;
            pick.mech_revenue = rev;
            pick.opt = opt;
            pick.ratio = ratio;
        }
    }
    return pick;
}

AuctionInstance embed_multi_item(int n, int m, int i_star, int j_star, const Marginal& d,
                                 ValClass vc) {
    if (n < 1 || m < 1 || i_star < 0 || i_star >= n || j_star < 0 || j_star >= m)
        throw std::domain_error("embed_multi_item: bad cell");
    AuctionInstance inst;
    inst.name = "embedded";
    inst.n = n;
    inst.m = m;
    inst.val_class = vc;
    inst.marginals.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(m),
                          Marginal(DiscretePmf<Rat>::point_mass(Rat(1))));
    inst.marginals[static_cast<std::size_t>(i_star) * static_cast<std::size_t>(m) +
                   static_cast<std::size_t>(j_star)] = d;
    inst.validate();
    return inst;
}

RegularPair gen_regular_pair(const Rat& eps, const Rat& R, int t) {
    if (!(eps > 0) || !(eps < Rat(1, 64)))
        throw std::domain_error("regular pair: eps must lie in (0, 1/64)");
    if (!(R > 0)) throw std::domain_error("regular pair: R must be positive");
    if (t < 1) throw std::domain_error("regular pair: t must be >= 1");

    RegularPair rp;
    rp.eps = eps;
    rp.R = R;
    rp.t = t;
    rp.delta_eps = Rat(32) * eps;
    rp.q_t = Rat(t) * rp.delta_eps;
    rp.q_t1 = Rat(t + 1) * rp.delta_eps;
    if (!(rp.q_t1 <= Rat(1) - Rat(2) * rp.delta_eps))
        throw std::domain_error("regular pair: q_{t+1} must not exceed 1 - 2*32*eps");

    const Rat one(1);
    const Rat b1 = one - rp.q_t1;
    const Rat b2 = one + rp.q_t - rp.delta_eps;
    rp.vstar = R * (Rat(2) - rp.delta_eps) / (b2 - (one - rp.delta_eps) * b1);
    rp.qstar = one - (Rat(2) - rp.delta_eps) * b1 / (Rat(2) * (one - rp.delta_eps));
    rp.opt1 = R / (one - rp.delta_eps);
    rp.opt2 = R * (Rat(2) - rp.delta_eps) / (Rat(2) * (one - rp.delta_eps));

    const double Rd = scalar_traits<Rat>::to_double(R);
    const double b1d = scalar_traits<Rat>::to_double(b1);
    const double b2d = scalar_traits<Rat>::to_double(b2);
    const double top = scalar_traits<Rat>::to_double(R / rp.q_t);
    const double vstar_d = scalar_traits<Rat>::to_double(rp.vstar);

    PiecewiseDist p1;
    p1.segments.push_back({0.0, top, Rd, b1d, Rd});
    p1.atoms.push_back(
        {top, scalar_traits<Rat>::to_double(rp.q_t / (one - rp.delta_eps))});
    rp.d1 = Marginal(ContinuousDist(p1));

    PiecewiseDist p2;
    p2.segments.push_back({0.0, vstar_d, Rd, b1d, Rd});
    p2.segments.push_back({vstar_d, top, scalar_traits<Rat>::to_double(R * (one - rp.delta_eps)),
                           b2d, -Rd});
    p2.atoms.push_back({top, scalar_traits<Rat>::to_double(rp.q_t)});
    rp.d2 = Marginal(ContinuousDist(p2));
    return rp;
}

}  // namespace qmech
