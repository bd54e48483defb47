#pragma once

#include "qmech/rng.hpp"
#include "qmech/scalar.hpp"

#include <variant>
#include <vector>

namespace qmech {

struct UniformDist {
    double a = 0, b = 1;
};

// Exponential with rate lambda, optionally capped at the value whose upper
// tail mass is cap_tail (mass moves into an atom at the cap).  cap_tail = 0
// means uncapped.
struct ExponentialDist {
    double lambda = 1;
    double cap_tail = 0;
    double cap_value() const;
};

// One branch of a piecewise tail function Pr[X >= v] = a / (b*v + c) on
// [v_lo, v_hi].  Branches of this shape cover every closed-form family the
// generators emit; atoms at branch right-endpoints are implied by the formula
// value there.
struct TailSegment {
    double v_lo = 0, v_hi = 0;
    double a = 0, b = 0, c = 0;
    double eval(double v) const { return a / (b * v + c); }
};

struct PiecewiseDist {
    std::vector<TailSegment> segments;               // contiguous, ascending
    std::vector<std::pair<double, double>> atoms;    // (value, mass), metadata
};

using ContinuousDist = std::variant<UniformDist, ExponentialDist, PiecewiseDist>;

double ccdf(const ContinuousDist& d, double v);                 // Pr[X >= v]
QuantileAnswer<double> quantile(const ContinuousDist& d, double q);
double mean(const ContinuousDist& d);
double sample(const ContinuousDist& d, Rng& rng);
double support_max(const ContinuousDist& d);
std::vector<double> breakpoints(const ContinuousDist& d);

struct PricePoint {
    double price = 0;
    double revenue = 0;
};

// max over x >= floor of x * Pr[X >= x]; exact via per-family candidate sets
// (revenue is monotone between candidates for every supported family).
PricePoint optimal_posted_price(const ContinuousDist& d, double floor);

}  // namespace qmech
