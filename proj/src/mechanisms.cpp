#include "qmech/mechanisms.hpp"

#include <stdexcept>

namespace qmech {

MechKind mech_from_name(const std::string& s) {
    for (MechKind k : {MechKind::EVM, MechKind::EVUD, MechKind::EVBVCG, MechKind::EVA,
                       MechKind::EQM, MechKind::EQUD, MechKind::EQBVCG, MechKind::EQA,
                       MechKind::EMR, MechKind::SM})
        if (s == mech_name(k)) return k;
    throw std::invalid_argument("unknown mechanism: " + s);
}

DerivedParams derive_params(const MechSpec& spec, ValClass vc, int n, int m) {
    const Rat& e = spec.eps;
    if (!(e > 0)) throw std::domain_error("derive_params: eps must be positive");
    if (n < 1 || m < 1) throw std::domain_error("derive_params: n, m must be >= 1");
    if (!(spec.H >= 1)) throw std::domain_error("derive_params: H must be >= 1");

    DerivedParams dp;
    auto quantile_k = [&](const Rat& base, const Rat& eps1, int root) {
        if (!(eps1 > 0 && eps1 <= 1))
            throw std::domain_error("derive_params: eps1 must lie in (0,1], got " +
                                    format_rational(eps1));
        return ceil_log_ratio_root(base, Rat(1) / eps1, root);
    };

    switch (spec.kind) {
        case MechKind::EVM:
        case MechKind::EVUD: {
            dp.scheme = Scheme::Value;
            dp.base = Rat(1) + e;
            dp.root = 1;
            dp.k = ceil_log_ratio(dp.base, spec.H);
            break;
        }
        case MechKind::EVBVCG:
        case MechKind::EVA: {
            dp.scheme = Scheme::Value;
            dp.base = Rat(1) + e;
            dp.root = 2;
            dp.k = ceil_log_ratio_root(dp.base, spec.H, 2);
            dp.mixture = (spec.kind == MechKind::EVA);
            break;
        }
        case MechKind::EQM:
        case MechKind::EQUD: {
            dp.scheme = Scheme::QuantileGeometric;
            dp.base = Rat(1) + e / 3;
            dp.root = 1;
            dp.delta1 = Rat(2) * e / (Rat(3) * (Rat(1) + e));
            dp.eps1 = spec.tail.resolve(dp.delta1, n, m, spec.H);
            dp.k = quantile_k(dp.base, dp.eps1, 1);
            break;
        }
        case MechKind::EQBVCG:
        case MechKind::EQA: {
            dp.scheme = Scheme::QuantileGeometric;
            dp.base = Rat(1) + e / 5;
            dp.root = m;
            dp.delta1 = e / (Rat(10) * (Rat(1) + e));
            dp.eps1 = spec.tail.resolve(dp.delta1, n, m, spec.H);
            dp.k = quantile_k(dp.base, dp.eps1, m);
            if (spec.kind == MechKind::EQA) {
                dp.mixture = true;
                dp.has_im_phase = true;
                dp.base_im = Rat(1) + e / 15;
                dp.delta1_im = Rat(2) * e / (Rat(3) * (Rat(5) + e));
                dp.eps1_im = spec.tail.resolve(dp.delta1_im, n, m, spec.H);
                dp.k_im = quantile_k(dp.base_im, dp.eps1_im, 1);
            }
            break;
        }
        case MechKind::EMR: {
            dp.scheme = Scheme::QuantileGeometric;
            dp.base = Rat(1) + e / 4;
            dp.root = 1;
            dp.eps1 = e * e / (Rat(256) * Rat(n));
            dp.k = quantile_k(dp.base, dp.eps1, 1);
            break;
        }
        case MechKind::SM: {
            if (vc == ValClass::Additive) {
                dp.scheme = Scheme::QuantileUniform;
                dp.base = Rat(1);
                dp.root = 1;
                dp.delta1 = e / (Rat(10) * (Rat(1) + e));
                dp.eps1 = spec.tail.resolve(dp.delta1, n, m, spec.H);
                if (!(dp.eps1 > 0 && dp.eps1 <= 1))
                    throw std::domain_error("derive_params: eps1 must lie in (0,1]");
                dp.k = floor_reciprocal(dp.eps1);
                dp.mixture = true;
            } else {
                dp.scheme = Scheme::QuantileGeometric;
                dp.base = Rat(1) + e / 6;
                dp.root = 1;
                dp.delta1 = Rat(2) * e / (Rat(3) * (Rat(1) + e));
                dp.eps1 = spec.tail.resolve(dp.delta1, n, m, spec.H);
                dp.k = quantile_k(dp.base, dp.eps1, 1);
            }
            break;
        }
    }
    return dp;
}

QueryCounts query_count_formula(const MechSpec& spec, ValClass vc, int n, int m) {
    auto dp = derive_params(spec, vc, n, m);
    QueryCounts qc;
    const std::int64_t per = static_cast<std::int64_t>(n) * m * (dp.k + 1);
    if (dp.scheme == Scheme::Value)
        qc.value = per;
    else
        qc.quantile = per;
    if (dp.has_im_phase) qc.quantile += static_cast<std::int64_t>(n) * m * (dp.k_im + 1);
    return qc;
}

MeanStderr mc_mechanism_revenue(const PreparedMechanism<double>& pm,
                                const std::vector<Marginal>& marginals, long trials,
                                std::uint64_t seed, bool parallel) {
    if (marginals.size() != pm.prior.size())
        throw std::invalid_argument("mc_mechanism_revenue: marginal count mismatch");
    auto f = [&](Rng& rng) -> double {
        std::vector<double> bids(marginals.size());
        for (std::size_t i = 0; i < marginals.size(); ++i) bids[i] = marginals[i].sample(rng);
        return mechanism_payment(pm, bids, Branch::Mixture, &rng);
    };
    return mc_mean(trials, seed, f, parallel);
}

}  // namespace qmech
