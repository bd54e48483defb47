#pragma once

#include "qmech/distribution.hpp"

#include <string>
#include <vector>

namespace qmech {

enum class ValClass { SingleItem, UnitDemand, Additive };

const char* val_class_name(ValClass c);
ValClass val_class_from_name(const std::string& s);

// n players, m items, independent marginal priors stored row-major by player.
struct AuctionInstance {
    std::string name;
    int n = 0;
    int m = 0;
    ValClass val_class = ValClass::SingleItem;
    std::vector<Marginal> marginals;  // marginals[i*m + j]

    const Marginal& marginal(int i, int j) const {
        return marginals[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
                         static_cast<std::size_t>(j)];
    }

    bool all_discrete() const;
    // per-(i,j) pmfs in the requested backend; throws on continuous marginals
    template <class T>
    std::vector<DiscretePmf<T>> pmfs() const {
        std::vector<DiscretePmf<T>> out;
        out.reserve(marginals.size());
        for (const auto& mg : marginals) out.push_back(mg.template pmf<T>());
        return out;
    }
    // counts weighted profiles of the product prior, capped
    double profile_count() const;
    double support_min() const;
    double support_max() const;

    void validate() const;
};

AuctionInstance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const AuctionInstance& inst);
AuctionInstance load_instance(const std::string& path);
void save_instance(const AuctionInstance& inst, const std::string& path);

// Random discrete test instances: supports are integer values drawn from
// [lo, hi], probabilities are random multiples of 1/denom (exact rationals).
struct RandomInstanceParams {
    int n = 1;
    int m = 1;
    ValClass val_class = ValClass::SingleItem;
    int max_support = 4;
    long value_lo = 1;
    long value_hi = 16;
    long prob_denom = 16;
};

AuctionInstance random_instance(const RandomInstanceParams& p, Rng& rng,
                                const std::string& name);

}  // namespace qmech
