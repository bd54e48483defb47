#pragma once

#include "qmech/continuous.hpp"
#include "qmech/pmf.hpp"
#include "qmech/scalar.hpp"

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace qmech {

// One marginal prior: either a discrete pmf with exact rational data or a
// closed-form continuous family.  This is the unit the instance files store
// and the oracles wrap.
class Marginal {
  public:
    Marginal() : dist_(DiscretePmf<Rat>::point_mass(Rat(1))) {}
    explicit Marginal(DiscretePmf<Rat> d) : dist_(std::move(d)) {}
    explicit Marginal(ContinuousDist d) : dist_(std::move(d)) {}

    bool is_discrete() const { return std::holds_alternative<DiscretePmf<Rat>>(dist_); }

    const DiscretePmf<Rat>& discrete() const;
    const ContinuousDist& continuous() const;

    template <class T>
    DiscretePmf<T> pmf() const {
        if constexpr (scalar_traits<T>::exact)
            return discrete();
        else
            return discrete().template cast<T>();
    }

    double ccdf(double v) const;
    QuantileAnswer<double> quantile(double q) const;
    double mean() const;
    double support_max() const;
    double sample(Rng& rng) const;
    // value locations where the ccdf changes shape (support points, segment
    // ends); used by dominance and regularity checks
    std::vector<double> breakpoints() const;

    const std::variant<DiscretePmf<Rat>, ContinuousDist>& raw() const { return dist_; }

  private:
    std::variant<DiscretePmf<Rat>, ContinuousDist> dist_;
};

Marginal marginal_from_json(const nlohmann::json& j);
nlohmann::json marginal_to_json(const Marginal& m);

// First-order dominance check in double, evaluated at both breakpoints sets
// and midpoints between them.
bool dominates(const Marginal& a, const Marginal& b, double tol = 1e-9);

struct RegularityReport {
    bool is_regular = false;
    bool evaluable = true;
    std::vector<std::pair<double, double>> curve;  // (q, q * v(q)), q ascending
};

// Samples the revenue curve R(q) = q * v(q) on a uniform quantile grid
// augmented with the quantiles of the distribution's breakpoints (so peaks at
// atoms are hit exactly), then checks concavity by slope monotonicity.
RegularityReport revenue_curve_regularity(const Marginal& d, int grid_size,
                                          double tol = 1e-7);

}  // namespace qmech
