#include "qmech/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qmech {

double ExponentialDist::cap_value() const {
    if (cap_tail <= 0) return std::numeric_limits<double>::infinity();
    return -std::log(cap_tail) / lambda;
}

namespace {

double ccdf_uniform(const UniformDist& d, double v) {
    if (v <= d.a) return 1.0;
    if (v > d.b) return 0.0;
    return (d.b - v) / (d.b - d.a);
}

double ccdf_exp(const ExponentialDist& d, double v) {
    if (v <= 0) return 1.0;
    if (v > d.cap_value()) return 0.0;
    return std::exp(-d.lambda * v);
}

double ccdf_piecewise(const PiecewiseDist& d, double v) {
    const auto& segs = d.segments;
    if (segs.empty()) throw std::domain_error("piecewise: no segments");
    if (v <= segs.front().v_lo) return 1.0;
    if (v > segs.back().v_hi) return 0.0;
    for (const auto& s : segs)
        if (v <= s.v_hi) return s.eval(v);
    return 0.0;
}

}  // namespace

double ccdf(const ContinuousDist& d, double v) {
    return std::visit([v](const auto& x) -> double {
        using D = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<D, UniformDist>) return ccdf_uniform(x, v);
        else if constexpr (std::is_same_v<D, ExponentialDist>) return ccdf_exp(x, v);
        else return ccdf_piecewise(x, v);
    }, d);
}

QuantileAnswer<double> quantile(const ContinuousDist& d, double q) {
    if (q < 0 || q > 1) throw std::domain_error("quantile: q outside [0,1]");
    if (q == 0) return {std::numeric_limits<double>::infinity(), true};
    return std::visit([q](const auto& x) -> QuantileAnswer<double> {
        using D = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<D, UniformDist>) {
            return {x.b - q * (x.b - x.a), false};
        } else if constexpr (std::is_same_v<D, ExponentialDist>) {
            double v = -std::log(q) / x.lambda;
            return {std::min(v, x.cap_value()), false};
        } else {
            const auto& segs = x.segments;
            double top = segs.back().v_hi;
            if (q <= segs.back().eval(top)) return {top, false};
            for (auto it = segs.rbegin(); it != segs.rend(); ++it)
                if (q <= it->eval(it->v_lo))
                    return {(it->a / q - it->c) / it->b, false};
            return {segs.front().v_lo, false};
        }
    }, d);
}

double mean(const ContinuousDist& d) {
    return std::visit([](const auto& x) -> double {
        using D = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<D, UniformDist>) {
            return 0.5 * (x.a + x.b);
        } else if constexpr (std::is_same_v<D, ExponentialDist>) {
            if (x.cap_tail <= 0) return 1.0 / x.lambda;
            return (1.0 - x.cap_tail) / x.lambda;  // integral of exp(-lv) over [0, cap]
        } else {
            // mean = integral of Pr[X >= v] dv for nonnegative support
            double s = 0;
            for (const auto& seg : x.segments)
                s += (seg.a / seg.b) *
                     (std::log(seg.b * seg.v_hi + seg.c) - std::log(seg.b * seg.v_lo + seg.c));
            return s;
        }
    }, d);
}

double sample(const ContinuousDist& d, Rng& rng) {
    double q = 1.0 - rng.uniform01();  // (0, 1]
    return quantile(d, q).value;
}

double support_max(const ContinuousDist& d) {
    return std::visit([](const auto& x) -> double {
        using D = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<D, UniformDist>) return x.b;
        else if constexpr (std::is_same_v<D, ExponentialDist>) return x.cap_value();
        else return x.segments.back().v_hi;
    }, d);
}

std::vector<double> breakpoints(const ContinuousDist& d) {
    return std::visit([](const auto& x) -> std::vector<double> {
        using D = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<D, UniformDist>) {
            return {x.a, x.b};
        } else if constexpr (std::is_same_v<D, ExponentialDist>) {
            std::vector<double> b{0.0};
            if (x.cap_tail > 0) b.push_back(x.cap_value());
            return b;
        } else {
            std::vector<double> b;
            for (const auto& s : x.segments) {
                b.push_back(s.v_lo);
                b.push_back(s.v_hi);
            }
            for (const auto& [v, m] : x.atoms) b.push_back(v);
            std::sort(b.begin(), b.end());
            b.erase(std::unique(b.begin(), b.end()), b.end());
            return b;
        }
    }, d);
}

PricePoint optimal_posted_price(const ContinuousDist& d, double floor) {
    std::vector<double> cand = breakpoints(d);
    std::visit([&](const auto& x) {
        using D = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<D, UniformDist>) {
            cand.push_back(0.5 * x.b);  // stationary point of v*(b-v)/(b-a)
        } else if constexpr (std::is_same_v<D, ExponentialDist>) {
            cand.push_back(1.0 / x.lambda);  // stationary point of v*exp(-lv)
        }
        // piecewise tail segments have monotone revenue, endpoints suffice
    }, d);
    cand.push_back(floor);
    double top = support_max(d);
    PricePoint best{floor, 0.0};
    bool first = true;
    for (double p : cand) {
        if (p < floor || !(p <= top) || !std::isfinite(p)) continue;
        double rev = p * ccdf(d, p);
        bool better = first || rev > best.revenue ||
                      (rev == best.revenue && p < best.price);
        if (better) {
            best = {p, rev};
            first = false;
        }
    }
    return best;
}

}  // namespace qmech
