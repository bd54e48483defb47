#include "qmech/distribution.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qmech {

namespace {

// shortest round-trip decimal, so json numbers like 0.3 become exactly 3/10
std::string double_to_text(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

Rat json_to_rational(const nlohmann::json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long long>());
    if (j.is_number_float()) return parse_rational(double_to_text(j.get<double>()));
    throw std::invalid_argument("expected number or rational string, got " + j.dump());
}

}  // namespace

const DiscretePmf<Rat>& Marginal::discrete() const {
    if (!is_discrete()) throw std::domain_error("Marginal: not discrete");
    return std::get<DiscretePmf<Rat>>(dist_);
}

const ContinuousDist& Marginal::continuous() const {
    if (is_discrete()) throw std::domain_error("Marginal: not continuous");
    return std::get<ContinuousDist>(dist_);
}

double Marginal::ccdf(double v) const {
    if (!is_discrete()) return qmech::ccdf(continuous(), v);
    const auto& d = discrete();
    double s = 0;
    for (std::size_t l = d.size(); l-- > 0;) {
        if (to_double(d.value(l)) < v) break;
        s += to_double(d.mass(l));
    }
    return s;
}

QuantileAnswer<double> Marginal::quantile(double q) const {
    if (!is_discrete()) return qmech::quantile(continuous(), q);
    auto a = discrete().quantile(Rat(q));
    return {a.infinite ? 0.0 : to_double(a.value), a.infinite};
}

double Marginal::mean() const {
    if (is_discrete()) return to_double(discrete().mean());
    return qmech::mean(continuous());
}

double Marginal::support_max() const {
    if (is_discrete()) return to_double(discrete().max_value());
    return qmech::support_max(continuous());
}

double Marginal::sample(Rng& rng) const {
    if (is_discrete()) return to_double(discrete().sample(rng));
    return qmech::sample(continuous(), rng);
}

std::vector<double> Marginal::breakpoints() const {
    std::vector<double> out;
    if (is_discrete()) {
        for (const auto& v : discrete().values()) out.push_back(to_double(v));
    } else {
        out = qmech::breakpoints(continuous());
    }
    return out;
}

Marginal marginal_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "pmf") {
        const auto& sup = j.at("support");
        const auto& pr = j.at("probs");
        if (!sup.is_array() || !pr.is_array() || sup.size() != pr.size())
            throw std::invalid_argument("pmf: support/probs must be arrays of equal length");
        std::vector<std::pair<Rat, Rat>> atoms;
        for (std::size_t i = 0; i < sup.size(); ++i)
            atoms.emplace_back(json_to_rational(sup[i]), json_to_rational(pr[i]));
        return Marginal(DiscretePmf<Rat>::from_atoms(std::move(atoms)));
    }
    if (kind == "uniform") {
        UniformDist u;
        u.a = j.at("lo").get<double>();
        u.b = j.at("hi").get<double>();
        if (!(u.a < u.b)) throw std::invalid_argument("uniform: need lo < hi");
        return Marginal(ContinuousDist(u));
    }
    if (kind == "exponential") {
        ExponentialDist e;
        e.lambda = j.at("rate").get<double>();
        e.cap_tail = j.value("cap_tail", 0.0);
        if (!(e.lambda > 0)) throw std::invalid_argument("exponential: rate must be positive");
        return Marginal(ContinuousDist(e));
    }
    if (kind == "piecewise") {
        PiecewiseDist p;
        for (const auto& s : j.at("segments")) {
            TailSegment seg;
            seg.v_lo = s.at("v_lo").get<double>();
            seg.v_hi = s.at("v_hi").get<double>();
            seg.a = s.at("a").get<double>();
            seg.b = s.at("b").get<double>();
            seg.c = s.at("c").get<double>();
            p.segments.push_back(seg);
        }
        if (p.segments.empty()) throw std::invalid_argument("piecewise: no segments");
        if (j.contains("atoms"))
            for (const auto& a : j.at("atoms"))
                p.atoms.emplace_back(a.at("v").get<double>(), a.at("p").get<double>());
        return Marginal(ContinuousDist(std::move(p)));
    }
    throw std::invalid_argument("unknown marginal kind: " + kind);
}

nlohmann::json marginal_to_json(const Marginal& m) {
    nlohmann::json j;
    if (m.is_discrete()) {
        j["kind"] = "pmf";
        auto& sup = j["support"] = nlohmann::json::array();
        auto& pr = j["probs"] = nlohmann::json::array();
        const auto& d = m.discrete();
        for (std::size_t l = 0; l < d.size(); ++l) {
            sup.push_back(format_rational(d.value(l)));
            pr.push_back(format_rational(d.mass(l)));
        }
        return j;
    }
    const auto& c = m.continuous();
    if (const auto* u = std::get_if<UniformDist>(&c)) {
        j["kind"] = "uniform";
        j["lo"] = u->a;
        j["hi"] = u->b;
    } else if (const auto* e = std::get_if<ExponentialDist>(&c)) {
        j["kind"] = "exponential";
        j["rate"] = e->lambda;
        j["cap_tail"] = e->cap_tail;
    } else {
        const auto& p = std::get<PiecewiseDist>(c);
        j["kind"] = "piecewise";
        auto& segs = j["segments"] = nlohmann::json::array();
        for (const auto& s : p.segments)
            segs.push_back({{"v_lo", s.v_lo},
                            {"v_hi", s.v_hi},
                            {"a", s.a},
                            {"b", s.b},
                            {"c", s.c}});
        auto& atoms = j["atoms"] = nlohmann::json::array();
        for (const auto& [v, mass] : p.atoms) atoms.push_back({{"v", v}, {"p", mass}});
    }
    return j;
}

bool dominates(const Marginal& a, const Marginal& b, double tol) {
    std::vector<double> pts = a.breakpoints();
    auto bb = b.breakpoints();
    pts.insert(pts.end(), bb.begin(), bb.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<double> checks = pts;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) checks.push_back((pts[i] + pts[i + 1]) / 2);
    for (double v : checks)
        if (a.ccdf(v) + tol < b.ccdf(v)) return false;
    return true;
}

RegularityReport revenue_curve_regularity(const Marginal& d, int grid_size, double tol) {
    RegularityReport rep;
    if (grid_size < 2) throw std::domain_error("revenue_curve_regularity: grid too small");

    std::vector<double> qs;
    qs.reserve(static_cast<std::size_t>(grid_size) + 8);
    for (int i = 1; i <= grid_size; ++i)
        qs.push_back(static_cast<double>(i) / static_cast<double>(grid_size));
    for (double v : d.breakpoints()) {
        double q = d.ccdf(v);
        if (q > 0 && q <= 1) qs.push_back(q);
    }
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());

    for (double q : qs) {
        auto a = d.quantile(q);
        if (a.infinite) {
            rep.evaluable = false;
            return rep;
        }
        rep.curve.emplace_back(q, q * a.value);
    }

    rep.is_regular = true;
    double prev_slope = std::numeric_limits<double>::infinity();
    double scale = 0;
    for (const auto& [q, r] : rep.curve) scale = std::max(scale, std::abs(r));
    scale = std::max(scale, 1.0);
    for (std::size_t i = 0; i + 1 < rep.curve.size(); ++i) {
        double dq = rep.curve[i + 1].first - rep.curve[i].first;
        if (dq <= 0) continue;
        double s = (rep.curve[i + 1].second - rep.curve[i].second) / dq;
        if (s > prev_slope + tol * scale) {
            rep.is_regular = false;
            break;
        }
        prev_slope = s;
    }
    return rep;
}

}  // namespace qmech
