#pragma once

#include "qmech/bvcg.hpp"
#include "qmech/copies.hpp"
#include "qmech/coupling.hpp"
#include "qmech/discretize.hpp"
#include "qmech/distribution.hpp"
#include "qmech/instance.hpp"
#include "qmech/myerson.hpp"
#include "qmech/revenue.hpp"
#include "qmech/rng.hpp"
#include "qmech/scalar.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace qmech {

enum class MechKind { EVM, EVUD, EVBVCG, EVA, EQM, EQUD, EQBVCG, EQA, EMR, SM };

inline const char* mech_name(MechKind k) {
    switch (k) {
        case MechKind::EVM: return "evm";
        case MechKind::EVUD: return "evud";
        case MechKind::EVBVCG: return "evbvcg";
        case MechKind::EVA: return "eva";
        case MechKind::EQM: return "eqm";
        case MechKind::EQUD: return "equd";
        case MechKind::EQBVCG: return "eqbvcg";
        case MechKind::EQA: return "eqa";
        case MechKind::EMR: return "emr";
        case MechKind::SM: return "sm";
    }
    return "?";
}

MechKind mech_from_name(const std::string& s);

// Maps a tail-mass parameter delta1 to the quantile floor eps1.  Bounded
// supports admit the closed form delta1 / (m^2 n H); otherwise the caller
// supplies eps1 directly or a lookup table.
struct TailSpec {
    enum class Kind { Bounded, Explicit, Table };
    Kind kind = Kind::Bounded;
    Rat eps1{};
    std::vector<std::pair<Rat, Rat>> table;

    static TailSpec bounded() { return TailSpec{}; }
    static TailSpec explicit_eps1(const Rat& e) {
        TailSpec t;
        t.kind = Kind::Explicit;
        t.eps1 = e;
        return t;
    }

    Rat resolve(const Rat& delta1, int n, int m, const Rat& H) const {
        switch (kind) {
            case Kind::Bounded: {
                if (!(H > 0)) throw std::domain_error("tail: bounded form needs H > 0");
                return delta1 / (Rat(m) * Rat(m) * Rat(n) * H);
            }
            case Kind::Explicit: return eps1;
            case Kind::Table: {
                for (const auto& [d, e] : table)
                    if (d == delta1) return e;
                throw std::domain_error("tail table has no entry for delta1 = " +
                                        format_rational(delta1));
            }
        }
        throw std::logic_error("tail: bad kind");
    }
};

// One mechanism request: kind plus the exact rational parameters every
// derived quantity is computed from.
struct MechSpec {
    MechKind kind = MechKind::EVM;
    Rat eps = Rat(1);
    Rat H = Rat(0);  // 0 means derive from the instance support
    TailSpec tail;
    long samples = 0;           // SM: empirical sample count per marginal
    std::uint64_t aux_seed = 1; // tie-breaking randomness for price estimation
};

struct DerivedParams {
    Scheme scheme = Scheme::Value;
    Rat base = Rat(2);  // grid ratio is base^(1/root)
    int root = 1;
    long k = 0;
    Rat eps1{};
    Rat delta1{};
    bool mixture = false;
    bool has_im_phase = false;
    Rat base_im{};
    Rat eps1_im{};
    Rat delta1_im{};
    long k_im = 0;
};

struct ExactBackendUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

DerivedParams derive_params(const MechSpec& spec, ValClass vc, int n, int m);

struct QueryCounts {
    std::int64_t value = 0;
    std::int64_t quantile = 0;
};

QueryCounts query_count_formula(const MechSpec& spec, ValClass vc, int n, int m);

template <class T>
T from_rat(const Rat& x) {
    if constexpr (std::is_same_v<T, Rat>)
        return x;
    else if constexpr (scalar_traits<T>::exact)
        return T(x);
    else
        return scalar_traits<Rat>::to_double(x);
}

// Grid ratio base^(1/root) in the working scalar type.  Exact backends
// refuse ratios outside their field instead of approximating them; extension
// scalars expose the roots they can represent through a static grid_root.
template <class T>
T grid_ratio(const Rat& base, int root) {
    if constexpr (std::is_same_v<T, Rat>) {
        auto r = exact_root(base, root);
        if (!r)
            throw ExactBackendUnavailable("grid ratio " + format_rational(base) + "^(1/" +
                                          std::to_string(root) + ") is irrational");
        return *r;
    } else if constexpr (scalar_traits<T>::exact) {
        auto r = T::grid_root(base, root);
        if (!r)
            throw ExactBackendUnavailable("grid ratio " + format_rational(base) + "^(1/" +
                                          std::to_string(root) +
                                          ") lies outside the exact scalar field");
        return *r;
    } else {
        double b = scalar_traits<Rat>::to_double(base);
        return root == 1 ? b : std::pow(b, 1.0 / static_cast<double>(root));
    }
}

// Oracle source over one instance marginal for the floating backend.
class MarginalSource {
  public:
    using scalar = double;

    explicit MarginalSource(const Marginal& m) {
        if (m.is_discrete())
            src_.emplace<DiscretePmf<double>>(m.pmf<double>());
        else
            src_.emplace<ContinuousDist>(m.continuous());
    }
    static MarginalSource empirical(std::vector<double> samples) {
        return MarginalSource(EmpiricalSource(std::move(samples)));
    }

    double value_query(const double& v) {
        return std::visit([&](auto& s) { return source_value(s, v); }, src_);
    }
    QuantileAnswer<double> quantile_query(const double& q) {
        return std::visit([&](auto& s) { return source_quantile(s, q); }, src_);
    }

  private:
    explicit MarginalSource(EmpiricalSource e) : src_(std::move(e)) {}

    static double source_value(const DiscretePmf<double>& d, double v) { return d.ccdf(v); }
    static double source_value(const ContinuousDist& d, double v) { return ccdf(d, v); }
    static double source_value(EmpiricalSource& d, double v) { return d.value_query(v); }
    static QuantileAnswer<double> source_quantile(const DiscretePmf<double>& d, double q) {
        return d.quantile(q);
    }
    static QuantileAnswer<double> source_quantile(const ContinuousDist& d, double q) {
        return quantile(d, q);
    }
    static QuantileAnswer<double> source_quantile(EmpiricalSource& d, double q) {
        return d.quantile_query(q);
    }

    std::variant<DiscretePmf<double>, ContinuousDist, EmpiricalSource> src_;
};

enum class Branch { Mixture, BvcgBranch, ImBranch };

template <class T>
struct PreparedMechanism {
    MechKind kind{};
    ValClass vc{};
    int n = 0, m = 0;
    DerivedParams dp;
    std::vector<DiscretePmf<T>> prior;     // rounded marginals, row-major n*m
    std::vector<DiscretePmf<T>> prior_im;  // second query phase, when present
    std::int64_t queries_value = 0;
    std::int64_t queries_quantile = 0;

    std::vector<VirtualTable<T>> mrs_tabs;
    std::optional<CopiesInstance<T>> copies;
    std::vector<std::optional<T>> ud_prices;
    CopiesOrder order = CopiesOrder::Grouped;
    std::vector<std::vector<VirtualTable<T>>> im_cols;

    bool mixture() const { return dp.mixture; }
    bool uses_fees() const {
        return vc == ValClass::Additive;  // BVCG alone or as a mixture branch
    }
};

namespace detail {

inline void check_kind_class(MechKind kind, ValClass vc) {
    auto need = [&](ValClass want) {
        if (vc != want)
            throw std::invalid_argument(std::string("mechanism ") + mech_name(kind) +
                                        " does not handle this valuation class");
    };
    switch (kind) {
        case MechKind::EVM:
        case MechKind::EQM:
        case MechKind::EMR: need(ValClass::SingleItem); break;
        case MechKind::EVUD:
        case MechKind::EQUD: need(ValClass::UnitDemand); break;
        case MechKind::EVBVCG:
        case MechKind::EVA:
        case MechKind::EQBVCG:
        case MechKind::EQA: need(ValClass::Additive); break;
        case MechKind::SM: break;
    }
}

}  // namespace detail

// Runs the query phase against the supplied per-marginal oracles and builds
// the execution state.  The oracle type only needs value_query/quantile_query
// members, so counting or recording wrappers slot in unchanged.
template <class O, class T = typename O::scalar>
PreparedMechanism<T> prepare_mechanism(const MechSpec& spec, ValClass vc, int n, int m,
                                       std::vector<O>& oracles) {
    detail::check_kind_class(spec.kind, vc);
    if (oracles.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(m))
        throw std::invalid_argument("prepare_mechanism: oracle count mismatch");

    PreparedMechanism<T> pm;
    pm.kind = spec.kind;
    pm.vc = vc;
    pm.n = n;
    pm.m = m;
    pm.dp = derive_params(spec, vc, n, m);

    const T Ht = from_rat<T>(spec.H);
    const T ratio = grid_ratio<T>(pm.dp.base, pm.dp.root);
    const T delta = ratio - T(1);
    const T eps1 = from_rat<T>(pm.dp.eps1);

    for (auto& o : oracles) {
        DiscretizedPrior<T> d;
        switch (pm.dp.scheme) {
            case Scheme::Value:
                d = discretize_value_grid(o, value_grid_geometric(ratio, Ht, pm.dp.k), Ht,
                                          delta);
                break;
            case Scheme::QuantileGeometric:
                d = discretize_quantile_grid(o, quantile_grid_geometric(ratio, eps1, pm.dp.k),
                                             delta, eps1, Scheme::QuantileGeometric);
                break;
            case Scheme::QuantileUniform:
                d = discretize_quantile_grid(o, quantile_grid_uniform(eps1, pm.dp.k), T(0),
                                             eps1, Scheme::QuantileUniform);
                break;
        }
        pm.queries_value += d.value_queries;
        pm.queries_quantile += d.quantile_queries;
        pm.prior.push_back(std::move(d.pmf));
    }

    if (pm.dp.has_im_phase) {
        const T ratio_im = from_rat<T>(pm.dp.base_im);
        const T delta_im = ratio_im - T(1);
        const T eps1_im = from_rat<T>(pm.dp.eps1_im);
        for (auto& o : oracles) {
            auto d = discretize_quantile_grid(
                o, quantile_grid_geometric(ratio_im, eps1_im, pm.dp.k_im), delta_im, eps1_im,
                Scheme::QuantileGeometric);
            pm.queries_value += d.value_queries;
            pm.queries_quantile += d.quantile_queries;
            pm.prior_im.push_back(std::move(d.pmf));
        }
    }

    switch (vc) {
        case ValClass::SingleItem: {
            pm.mrs_tabs.reserve(pm.prior.size());
            for (const auto& p : pm.prior) pm.mrs_tabs.push_back(build_virtual_table(p));
            break;
        }
        case ValClass::UnitDemand: {
            pm.copies = build_copies(pm.prior, n, m);
            pm.ud_prices = copies_posted_prices(*pm.copies, 1e7, spec.aux_seed);
            break;
        }
        case ValClass::Additive: {
            if (pm.dp.mixture) {
                const auto& im_prior = pm.prior_im.empty() ? pm.prior : pm.prior_im;
                pm.im_cols = column_tables(n, m, im_prior);
            }
            break;
        }
    }
    return pm;
}

// Payment collected from one bid profile.  Mixture mechanisms draw the branch
// coin from mix_rng unless the caller pins a branch.
template <class T>
T mechanism_payment(const PreparedMechanism<T>& pm, const std::vector<T>& bids,
                    Branch branch = Branch::Mixture, Rng* mix_rng = nullptr,
                    FeeCache<T>* cache = nullptr) {
    switch (pm.vc) {
        case ValClass::SingleItem: {
            auto o = mrs_outcome(pm.mrs_tabs, bids);
            return o.winner >= 0 ? o.payment : T(0);
        }
        case ValClass::UnitDemand:
            return sequential_posted_price_copies(*pm.copies, pm.ud_prices, bids, pm.order)
                .revenue;
        case ValClass::Additive: {
            if (!pm.mixture())
                return bvcg_outcome(pm.n, pm.m, bids, pm.prior, cache).revenue;
            Branch br = branch;
            if (br == Branch::Mixture) {
                if (!mix_rng)
                    throw std::invalid_argument("mixture mechanism needs an rng or a branch");
                br = mix_rng->uniform01() < 0.25 ? Branch::BvcgBranch : Branch::ImBranch;
            }
            if (br == Branch::BvcgBranch)
                return bvcg_outcome(pm.n, pm.m, bids, pm.prior, cache).revenue;
            return per_item_myerson_payment(pm.im_cols, bids);
        }
    }
    throw std::logic_error("mechanism_payment: bad valuation class");
}

// Exact expected revenue over a discrete true profile distribution.  Mixture
// mechanisms are combined analytically (1/4 entry-fee branch, 3/4 item-wise
// branch); requesting a specific branch returns that branch's revenue alone.
// Entry-fee evaluation memoizes fees and therefore runs serially.
template <class T>
T exact_mechanism_revenue(const PreparedMechanism<T>& pm,
                          const std::vector<const DiscretePmf<T>*>& truth,
                          Branch branch = Branch::Mixture, bool parallel = true) {
    if (pm.vc == ValClass::Additive) {
        FeeCache<T> cache;
        const T quarter = T(1) / T(4);
        auto f = [&](const std::vector<T>& bids) -> T {
            if (!pm.mixture() || branch == Branch::BvcgBranch)
                return bvcg_outcome(pm.n, pm.m, bids, pm.prior, &cache).revenue;
            if (branch == Branch::ImBranch) return per_item_myerson_payment(pm.im_cols, bids);
            T b = bvcg_outcome(pm.n, pm.m, bids, pm.prior, &cache).revenue;
            T im = per_item_myerson_payment(pm.im_cols, bids);
            return quarter * b + (T(1) - quarter) * im;
        };
        return expect_over_profiles(truth, f, false);
    }
    auto f = [&](const std::vector<T>& bids) -> T {
        return mechanism_payment<T>(pm, bids);
    };
    return expect_over_profiles(truth, f, parallel);
}

// Monte Carlo revenue against the true marginals (floating backend).  Bids
// are drawn first, then the mixture coin, from the same per-trial stream.
MeanStderr mc_mechanism_revenue(const PreparedMechanism<double>& pm,
                                const std::vector<Marginal>& marginals, long trials,
                                std::uint64_t seed, bool parallel = true);

// Revenue of the coupled shadow mechanism: the buyer profile is drawn from
// the rounded priors, each true value is regenerated through the resampling
// kernel, the auction tuned to the true priors runs on the regenerated
// profile, and the winner pays only if the rounded value still covers the
// price.  Dominated by the rounded-prior auction's own revenue.
template <class T>
T m_star_revenue(const std::vector<const DiscretePmf<T>*>& truth,
                 const std::vector<const DiscretePmf<T>*>& rounded) {
    const std::size_t n = truth.size();
    if (rounded.size() != n) throw std::invalid_argument("m_star_revenue: size mismatch");

    std::vector<VirtualTable<T>> tabs;
    tabs.reserve(n);
    for (const auto* d : truth) tabs.push_back(build_virtual_table(*d));

    struct PairAtom {
        T w, vprime, v;
    };
    std::vector<std::vector<PairAtom>> joint(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto K = resample_matrix(*truth[i], *rounded[i]);
        for (std::size_t lp = 0; lp < K.from_values.size(); ++lp) {
            const T row_w = rounded[i]->mass(lp);
            for (std::size_t l = 0; l < K.to_values.size(); ++l) {
                T w = row_w * K.prob[lp][l];
                if (w == T(0)) continue;
                joint[i].push_back({w, K.from_values[lp], K.to_values[l]});
            }
        }
    }

    T total(0);
    std::vector<std::size_t> idx(n, 0);
    std::vector<T> v(n), vp(n);
    for (;;) {
        T w(1);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = joint[i][idx[i]];
            w *= a.w;
            v[i] = a.v;
            vp[i] = a.vprime;
        }
        auto o = mrs_outcome(tabs, v);
        if (o.winner >= 0 && o.payment <= vp[static_cast<std::size_t>(o.winner)])
            total += w * o.payment;
        std::size_t j = n;
        while (j-- > 0) {
            if (++idx[j] < joint[j].size()) break;
            idx[j] = 0;
        }
        if (j == static_cast<std::size_t>(-1)) break;
    }
    return total;
}

// Reference evaluations of the simple auctions run directly on known priors
// (no query phase): tuned to and evaluated on the same distributions.
template <class T>
T eval_mrs_exact(const std::vector<DiscretePmf<T>>& pmfs, bool parallel = true) {
    std::vector<VirtualTable<T>> tabs;
    tabs.reserve(pmfs.size());
    for (const auto& p : pmfs) tabs.push_back(build_virtual_table(p));
    std::vector<const DiscretePmf<T>*> ptrs;
    ptrs.reserve(pmfs.size());
    for (const auto& p : pmfs) ptrs.push_back(&p);
    auto f = [&](const std::vector<T>& bids) -> T {
        auto o = mrs_outcome(tabs, bids);
        return o.winner >= 0 ? o.payment : T(0);
    };
    return expect_over_profiles(ptrs, f, parallel);
}

template <class T>
struct UdEval {
    std::vector<std::optional<T>> prices;
    T revenue{};
};

template <class T>
UdEval<T> eval_ud_exact(const std::vector<DiscretePmf<T>>& pmfs, int n, int m,
                        CopiesOrder order = CopiesOrder::Grouped, bool parallel = true,
                        std::uint64_t aux_seed = 1) {
    UdEval<T> out;
    auto cp = build_copies(pmfs, n, m);
    out.prices = copies_posted_prices(cp, 1e7, aux_seed);
    std::vector<const DiscretePmf<T>*> ptrs;
    for (const auto& p : pmfs) ptrs.push_back(&p);
    auto f = [&](const std::vector<T>& bids) -> T {
        return sequential_posted_price_copies(cp, out.prices, bids, order).revenue;
    };
    out.revenue = expect_over_profiles(ptrs, f, parallel);
    return out;
}

template <class T>
T eval_im_exact(const std::vector<DiscretePmf<T>>& pmfs, int n, int m, bool parallel = true) {
    auto cols = column_tables(n, m, pmfs);
    std::vector<const DiscretePmf<T>*> ptrs;
    for (const auto& p : pmfs) ptrs.push_back(&p);
    auto f = [&](const std::vector<T>& bids) -> T {
        return per_item_myerson_payment(cols, bids);
    };
    return expect_over_profiles(ptrs, f, parallel);
}

template <class T>
T eval_bvcg_exact(const std::vector<DiscretePmf<T>>& pmfs, int n, int m) {
    std::vector<const DiscretePmf<T>*> ptrs;
    for (const auto& p : pmfs) ptrs.push_back(&p);
    FeeCache<T> cache;
    auto f = [&](const std::vector<T>& bids) -> T {
        return bvcg_outcome(n, m, bids, pmfs, &cache).revenue;
    };
    return expect_over_profiles(ptrs, f, false);
}

}  // namespace qmech
