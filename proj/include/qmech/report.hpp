#pragma once

#include "qmech/instance.hpp"
#include "qmech/mechanisms.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qmech {

// One evaluated cell: a mechanism on an instance at one eps.
struct MechanismReport {
    std::string instance_id;
    std::string mech;
    std::string eps;
    std::int64_t queries_v = 0;
    std::int64_t queries_q = 0;
    double rev = 0;
    std::string rev_method;  // "exact" | "mc"
    double se = 0;           // stderr of rev, mc only
    long trials = 0;
    std::string benchmark_name;
    double benchmark = 0;
    double ratio = 0;
    double threshold = 0;
    bool pass = false;
    std::uint64_t seed = 0;
    bool upper_bound_only = false;
    std::string backend;  // "exact" | "float"
    std::string note;
};

std::string report_csv_header();
std::string report_csv_row(const MechanismReport& r);
nlohmann::json report_json(const MechanismReport& r);

struct Benchmark {
    std::string name = "none";
    double value = 0;
    double threshold = 0;
    bool upper_bound_only = false;
    // set when the benchmark came out of an exact chain, so pass/fail can be
    // decided with no floating tolerance at all
    std::optional<Rat> exact_value;
    Rat exact_threshold{};
};

// Picks the strongest computable revenue benchmark for the instance and the
// matching approximation threshold for the mechanism.
Benchmark benchmark_for(const AuctionInstance& inst, MechKind kind, const Rat& eps,
                        double enum_cap = 1e7);

// Largest support value, exact for discrete marginals.
Rat instance_H(const AuctionInstance& inst);

struct RunOptions {
    MechSpec spec;
    std::string backend = "auto";   // auto | exact | float
    std::string bids = "enumerate"; // enumerate | mc
    long trials = 100000;
    std::uint64_t seed = 1;
    CopiesOrder order = CopiesOrder::Grouped;
    double enum_cap = 1e7;
};

MechanismReport run_mechanism(const AuctionInstance& inst, const RunOptions& opt);

struct SuiteResult {
    std::vector<MechanismReport> rows;
    bool all_pass = true;
};

SuiteResult run_suite(const nlohmann::json& config);
std::string suite_csv(const std::vector<MechanismReport>& rows);
nlohmann::json suite_json(const std::vector<MechanismReport>& rows);

TailSpec tail_from_json(const nlohmann::json& j);

}  // namespace qmech
