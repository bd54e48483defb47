#include "qmech/instance.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

namespace qmech {

const char* val_class_name(ValClass c) {
    switch (c) {
        case ValClass::SingleItem: return "single_item";
        case ValClass::UnitDemand: return "unit_demand";
        case ValClass::Additive: return "additive";
    }
    return "?";
}

ValClass val_class_from_name(const std::string& s) {
    if (s == "single_item") return ValClass::SingleItem;
    if (s == "unit_demand") return ValClass::UnitDemand;
    if (s == "additive") return ValClass::Additive;
    throw std::invalid_argument("unknown valuation_class: " + s);
}

bool AuctionInstance::all_discrete() const {
    for (const auto& mg : marginals)
        if (!mg.is_discrete()) return false;
    return true;
}

double AuctionInstance::profile_count() const {
    double c = 1;
    for (const auto& mg : marginals) {
        if (!mg.is_discrete()) return std::numeric_limits<double>::infinity();
        c *= static_cast<double>(mg.discrete().size());
        if (c > 1e18) return 1e18;
    }
    return c;
}

double AuctionInstance::support_min() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& mg : marginals) {
        if (mg.is_discrete())
            lo = std::min(lo, to_double(mg.discrete().min_value()));
        else
            lo = std::min(lo, 0.0);
    }
    return lo;
}

double AuctionInstance::support_max() const {
    double hi = 0;
    for (const auto& mg : marginals) hi = std::max(hi, mg.support_max());
    return hi;
}

void AuctionInstance::validate() const {
    if (n < 1 || m < 1) throw std::invalid_argument("instance: need n >= 1 and m >= 1");
    if (val_class == ValClass::SingleItem && m != 1)
        throw std::invalid_argument("instance: single_item forces m = 1");
    if (marginals.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(m))
        throw std::invalid_argument("instance: marginal count must be n*m");
}

AuctionInstance instance_from_json(const nlohmann::json& j) {
    AuctionInstance inst;
    inst.name = j.value("name", "unnamed");
    inst.n = j.at("n").get<int>();
    inst.m = j.at("m").get<int>();
    inst.val_class = val_class_from_name(j.at("valuation_class").get<std::string>());
    const auto& rows = j.at("marginals");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(inst.n))
        throw std::invalid_argument("instance: marginals must have n rows");
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(inst.m))
            throw std::invalid_argument("instance: each marginal row must have m entries");
        for (const auto& cell : row) inst.marginals.push_back(marginal_from_json(cell));
    }
    inst.validate();
    return inst;
}

nlohmann::json instance_to_json(const AuctionInstance& inst) {
    nlohmann::json j;
    j["name"] = inst.name;
    j["n"] = inst.n;
    j["m"] = inst.m;
    j["valuation_class"] = val_class_name(inst.val_class);
    auto& rows = j["marginals"] = nlohmann::json::array();
    for (int i = 0; i < inst.n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int jj = 0; jj < inst.m; ++jj) row.push_back(marginal_to_json(inst.marginal(i, jj)));
        rows.push_back(std::move(row));
    }
    return j;
}

AuctionInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path);
    nlohmann::json j;
    in >> j;
    return instance_from_json(j);
}

void save_instance(const AuctionInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file: " + path);
    out << instance_to_json(inst).dump(2) << "\n";
}

AuctionInstance random_instance(const RandomInstanceParams& p, Rng& rng,
                                const std::string& name) {
    AuctionInstance inst;
    inst.name = name;
    inst.n = p.n;
    inst.m = p.m;
    inst.val_class = p.val_class;
    for (int cell = 0; cell < p.n * p.m; ++cell) {
        int k = static_cast<int>(rng.uniform_int(1, p.max_support));
        std::set<long> values;
        while (static_cast<int>(values.size()) < k)
            values.insert(rng.uniform_int(p.value_lo, p.value_hi));
        // positive integer weights summing to prob_denom
        std::vector<long> w(values.size(), 1);
        long rest = p.prob_denom - static_cast<long>(values.size());
        if (rest < 0) throw std::invalid_argument("random_instance: prob_denom too small");
        for (long r = 0; r < rest; ++r) ++w[static_cast<std::size_t>(rng.below(w.size()))];
        std::vector<std::pair<Rat, Rat>> atoms;
        std::size_t idx = 0;
        for (long v : values) atoms.emplace_back(Rat(v), Rat(w[idx++]) / Rat(p.prob_denom));
        inst.marginals.push_back(Marginal(DiscretePmf<Rat>::from_atoms(std::move(atoms))));
    }
    inst.validate();
    return inst;
}

}  // namespace qmech
