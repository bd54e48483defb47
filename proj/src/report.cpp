#include "qmech/report.hpp"

#include "qmech/copies.hpp"
#include "qmech/lp.hpp"
#include "qmech/oracle.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace qmech {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double to_d(const Rat& x) { return scalar_traits<Rat>::to_double(x); }

}  // namespace

std::string report_csv_header() {
    return "instance_id,mech,eps,queries_v,queries_q,rev,rev_method,benchmark_name,benchmark,"
           "ratio,threshold,pass,seed";
}

std::string report_csv_row(const MechanismReport& r) {
    std::ostringstream os;
    os << r.instance_id << ',' << r.mech << ',' << r.eps << ',' << r.queries_v << ','
       << r.queries_q << ',' << fmt_double(r.rev) << ',' << r.rev_method << ','
       << r.benchmark_name << ',' << fmt_double(r.benchmark) << ',' << fmt_double(r.ratio)
       << ',' << fmt_double(r.threshold) << ',' << (r.pass ? "true" : "false") << ',' << r.seed;
    return os.str();
}

nlohmann::json report_json(const MechanismReport& r) {
    nlohmann::json j{{"instance_id", r.instance_id},
                     {"mech", r.mech},
                     {"eps", r.eps},
                     {"queries_v", r.queries_v},
                     {"queries_q", r.queries_q},
                     {"rev", r.rev},
                     {"rev_method", r.rev_method},
                     {"benchmark_name", r.benchmark_name},
                     {"benchmark", r.benchmark},
                     {"ratio", r.ratio},
                     {"threshold", r.threshold},
                     {"pass", r.pass},
                     {"seed", r.seed},
                     {"backend", r.backend}};
    if (r.rev_method == "mc") {
        j["stderr"] = r.se;
        j["trials"] = r.trials;
    }
    if (r.upper_bound_only) j["upper_bound_only"] = true;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

Rat instance_H(const AuctionInstance& inst) {
    Rat h(0);
    for (const auto& mg : inst.marginals) {
        Rat top = mg.is_discrete() ? mg.discrete().max_value() : Rat(support_max(mg.continuous()));
        if (top > h) h = top;
    }
    return h;
}

Benchmark benchmark_for(const AuctionInstance& inst, MechKind kind, const Rat& eps,
                        double enum_cap) {
    Benchmark b;
    const Rat one(1);
    const bool discrete = inst.all_discrete();
    const bool small = inst.profile_count() <= enum_cap;

    switch (inst.val_class) {
        case ValClass::SingleItem: {
            b.exact_threshold = one / (one + eps);
            if (discrete && small) {
                auto pmfs = inst.pmfs<Rat>();
                Rat opt = optimal_revenue_single_item(pmfs);
                b.exact_value = opt;
                b.value = to_d(opt);
                b.name = "opt_single_item";
            } else if (inst.n == 1 && !inst.marginal(0, 0).is_discrete()) {
                auto pp = optimal_posted_price(inst.marginal(0, 0).continuous(), 0.0);
                b.value = pp.revenue;
                b.name = "monopoly_price";
            }
            break;
        }
        case ValClass::UnitDemand: {
            b.exact_threshold = one / (Rat(6) * (one + eps));
            if (discrete && small) {
                auto pmfs = inst.pmfs<Rat>();
                auto cp = build_copies(pmfs, inst.n, inst.m);
                Rat opt = opt_copies(cp);
                b.exact_value = opt;
                b.value = to_d(opt);
                b.name = "opt_copies";
            }
            break;
        }
        case ValClass::Additive: {
            const bool mixture_kind =
                kind == MechKind::EVA || kind == MechKind::EQA || kind == MechKind::SM;
            b.exact_threshold = mixture_kind ? one / (Rat(8) * (one + eps)) : Rat(0);
            if (inst.n == 1 && discrete) {
                try {
                    auto pmfs = inst.pmfs<Rat>();
                    auto lp = opt_single_buyer_lp(pmfs, ValClass::Additive);
                    b.exact_value = lp.value;
                    b.value = to_d(lp.value);
                    b.name = "lp_opt";
                    break;
                } catch (const std::domain_error&) {
                    // type space too large; fall through to the upper bound
                }
            }
            if (discrete && small) {
                auto pmfs = inst.pmfs<Rat>();
                Rat ub = Rat(2) * eval_bvcg_exact(pmfs, inst.n, inst.m) +
                         Rat(6) * eval_im_exact(pmfs, inst.n, inst.m);
                b.value = to_d(ub);
                b.name = "upper_2bvcg_6im";
                b.upper_bound_only = true;
            }
            break;
        }
    }

    b.threshold = to_d(b.exact_threshold);
    if (b.name == "none" || b.upper_bound_only || b.exact_threshold == Rat(0)) {
        // informational benchmark: no theorem ties the mechanism to it
        if (b.name == "none") b.threshold = 0;
    }
    return b;
}

namespace {

struct RevenueOutcome {
    double rev = 0;
    std::optional<Rat> rev_exact;
    std::string method = "exact";
    double se = 0;
    long trials = 0;
    std::int64_t queries_v = 0;
    std::int64_t queries_q = 0;
    std::string backend = "exact";
};

RevenueOutcome run_exact_backend(const AuctionInstance& inst, const MechSpec& spec,
                                 const RunOptions& opt) {
    auto pmfs = inst.pmfs<Rat>();
    std::vector<CountingOracle<PmfSource<Rat>>> oracles;
    oracles.reserve(pmfs.size());
    for (const auto& p : pmfs) oracles.emplace_back(PmfSource<Rat>{&p});

    auto pm = prepare_mechanism(spec, inst.val_class, inst.n, inst.m, oracles);
    pm.order = opt.order;

    std::vector<const DiscretePmf<Rat>*> truth;
    truth.reserve(pmfs.size());
    for (const auto& p : pmfs) truth.push_back(&p);

    RevenueOutcome out;
    out.rev_exact = exact_mechanism_revenue(pm, truth);
    out.rev = to_d(*out.rev_exact);
    for (const auto& o : oracles) {
        out.queries_v += o.value_queries();
        out.queries_q += o.quantile_queries();
    }
    return out;
}

RevenueOutcome run_float_backend(const AuctionInstance& inst, const MechSpec& spec,
                                 const RunOptions& opt) {
    std::vector<CountingOracle<MarginalSource>> oracles;
    oracles.reserve(inst.marginals.size());
    for (std::size_t idx = 0; idx < inst.marginals.size(); ++idx) {
        if (spec.kind == MechKind::SM) {
            if (spec.samples < 1)
                throw std::domain_error("sm needs a positive sample count");
            Rng rng(derive_seed(opt.seed, idx, 1001));
            std::vector<double> samples(static_cast<std::size_t>(spec.samples));
            for (auto& s : samples) s = inst.marginals[idx].sample(rng);
            oracles.emplace_back(MarginalSource::empirical(std::move(samples)));
        } else {
            oracles.emplace_back(MarginalSource(inst.marginals[idx]));
        }
    }

    auto pm = prepare_mechanism(spec, inst.val_class, inst.n, inst.m, oracles);
    pm.order = opt.order;

    RevenueOutcome out;
    out.backend = "float";
    const bool enumerable = opt.bids == "enumerate" && inst.all_discrete() &&
                            inst.profile_count() <= opt.enum_cap;
    if (enumerable) {
        auto truth_pmfs = inst.pmfs<double>();
        std::vector<const DiscretePmf<double>*> truth;
        truth.reserve(truth_pmfs.size());
        for (const auto& p : truth_pmfs) truth.push_back(&p);
        out.rev = exact_mechanism_revenue(pm, truth);
    } else {
        auto ms = mc_mechanism_revenue(pm, inst.marginals, opt.trials,
                                       derive_seed(opt.seed, 2), true);
        out.rev = ms.mean;
        out.se = ms.se;
        out.trials = ms.trials;
        out.method = "mc";
    }
    for (const auto& o : oracles) {
        out.queries_v += o.value_queries();
        out.queries_q += o.quantile_queries();
    }
    return out;
}

}  // namespace

MechanismReport run_mechanism(const AuctionInstance& inst, const RunOptions& opt) {
    MechSpec spec = opt.spec;
    if (spec.H == Rat(0)) spec.H = instance_H(inst);

    MechanismReport r;
    r.instance_id = inst.name;
    r.mech = mech_name(spec.kind);
    r.eps = format_rational(spec.eps);
    r.seed = opt.seed;

    bool want_exact;
    if (opt.backend == "exact") {
        want_exact = true;
    } else if (opt.backend == "float") {
        want_exact = false;
    } else if (opt.backend == "auto") {
        want_exact = inst.all_discrete() && opt.bids == "enumerate" &&
                     spec.kind != MechKind::SM && inst.profile_count() <= opt.enum_cap;
    } else {
        throw std::invalid_argument("backend must be auto, exact, or float");
    }

    RevenueOutcome rev;
    bool done = false;
    if (want_exact) {
        try {
            rev = run_exact_backend(inst, spec, opt);
            done = true;
        } catch (const ExactBackendUnavailable& e) {
            if (opt.backend == "exact") throw;
            r.note = std::string("exact backend unavailable: ") + e.what();
        }
    }
    if (!done) rev = run_float_backend(inst, spec, opt);

    r.rev = rev.rev;
    r.rev_method = rev.method;
    r.se = rev.se;
    r.trials = rev.trials;
    r.queries_v = rev.queries_v;
    r.queries_q = rev.queries_q;
    r.backend = rev.backend;

    auto b = benchmark_for(inst, spec.kind, spec.eps, opt.enum_cap);
    r.benchmark_name = b.name;
    r.benchmark = b.value;
    r.threshold = b.threshold;
    r.upper_bound_only = b.upper_bound_only;
    if (b.value > 0) r.ratio = r.rev / b.value;

    if (b.name == "none" || b.upper_bound_only || b.exact_threshold == Rat(0)) {
        r.pass = true;  // informational row; no theorem threshold applies
    } else if (rev.rev_exact && b.exact_value) {
        r.pass = *rev.rev_exact >= b.exact_threshold * (*b.exact_value);
    } else if (r.rev_method == "mc" && b.value > 0) {
        r.pass = r.ratio >= r.threshold - 3.0 * r.se / b.value;
    } else {
        r.pass = r.ratio >= r.threshold - 1e-12;
    }
    return r;
}

TailSpec tail_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "bounded") return TailSpec::bounded();
        if (s.rfind("eps1:", 0) == 0) return TailSpec::explicit_eps1(parse_rational(s.substr(5)));
        throw std::invalid_argument("tail: expected \"bounded\" or \"eps1:<rational>\"");
    }
    if (j.is_object()) {
        if (j.contains("eps1"))
            return TailSpec::explicit_eps1(parse_rational(j["eps1"].get<std::string>()));
        if (j.contains("table")) {
            TailSpec t;
            t.kind = TailSpec::Kind::Table;
            for (const auto& [k, v] : j["table"].items())
                t.table.emplace_back(parse_rational(k), parse_rational(v.get<std::string>()));
            return t;
        }
    }
    throw std::invalid_argument("tail: unrecognized specification");
}

namespace {

int draw_range(const nlohmann::json& g, const std::string& key, int fallback, Rng& rng) {
    if (!g.contains(key)) return fallback;
    const auto& v = g[key];
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_array() && v.size() == 2) {
        int lo = v[0].get<int>();
        int hi = v[1].get<int>();
        return static_cast<int>(rng.uniform_int(lo, hi));
    }
    throw std::invalid_argument("generator range for " + key + " must be int or [lo,hi]");
}

}  // namespace

SuiteResult run_suite(const nlohmann::json& config) {
    SuiteResult out;
    const std::uint64_t seed = config.value("seed", static_cast<std::uint64_t>(1));
    if (!config.contains("blocks") || !config["blocks"].is_array())
        throw std::invalid_argument("suite config needs a blocks array");

    int bidx = 0;
    for (const auto& blk : config["blocks"]) {
        const std::string bname = blk.value("name", "block" + std::to_string(bidx));

        std::vector<AuctionInstance> insts;
        if (blk.contains("instance_files"))
            for (const auto& p : blk["instance_files"])
                insts.push_back(load_instance(p.get<std::string>()));
        if (blk.contains("generator")) {
            const auto& g = blk["generator"];
            const long count = blk.value("count", 1);
            for (long i = 0; i < count; ++i) {
                Rng rng(derive_seed(seed, static_cast<std::uint64_t>(bidx),
                                    static_cast<std::uint64_t>(1000 + i)));
                RandomInstanceParams p;
                p.val_class = val_class_from_name(g.value("val_class", "single_item"));
                p.n = draw_range(g, "n", 1, rng);
                p.m = p.val_class == ValClass::SingleItem ? 1 : draw_range(g, "m", 1, rng);
                p.max_support = g.value("max_support", 4);
                p.value_lo = g.value("value_lo", 1);
                p.value_hi = g.value("value_hi", 16);
                p.prob_denom = g.value("prob_denom", 16);
                insts.push_back(random_instance(p, rng, bname + "-" + std::to_string(i)));
            }
        }
        if (insts.empty())
            throw std::invalid_argument("suite block " + bname + " produced no instances");

        RunOptions base;
        base.backend = blk.value("backend", "auto");
        base.bids = blk.value("bids", "enumerate");
        base.trials = blk.value("trials", 100000L);
        if (blk.contains("tail")) base.spec.tail = tail_from_json(blk["tail"]);
        base.spec.samples = blk.value("samples", 0L);
        if (blk.contains("order")) {
            const auto o = blk["order"].get<std::string>();
            if (o == "greedy-adversary")
                base.order = CopiesOrder::GreedyAdversary;
            else if (o != "grouped")
                throw std::invalid_argument("order must be grouped or greedy-adversary");
        }

        const auto& mechs = blk.at("mechs");
        const auto& epses = blk.at("eps");
        for (std::size_t ii = 0; ii < insts.size(); ++ii) {
            for (std::size_t mi = 0; mi < mechs.size(); ++mi) {
                for (std::size_t ei = 0; ei < epses.size(); ++ei) {
                    RunOptions o = base;
                    o.spec.kind = mech_from_name(mechs[mi].get<std::string>());
                    o.spec.eps = parse_rational(epses[ei].get<std::string>());
                    if (blk.contains("H")) o.spec.H = parse_rational(blk["H"].get<std::string>());
                    o.seed = derive_seed(seed,
                                         static_cast<std::uint64_t>(bidx) * 1000003u +
                                             static_cast<std::uint64_t>(ii),
                                         mi * 1009 + ei);
                    auto row = run_mechanism(insts[ii], o);
                    out.all_pass = out.all_pass && row.pass;
                    out.rows.push_back(std::move(row));
                }
            }
        }
        ++bidx;
    }
    return out;
}

std::string suite_csv(const std::vector<MechanismReport>& rows) {
    std::ostringstream os;
    os << report_csv_header() << '\n';
    for (const auto& r : rows) os << report_csv_row(r) << '\n';
    return os.str();
}

nlohmann::json suite_json(const std::vector<MechanismReport>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    long failures = 0;
    for (const auto& r : rows) {
        arr.push_back(report_json(r));
        if (!r.pass) ++failures;
    }
    return nlohmann::json{{"rows", arr},
                          {"count", rows.size()},
                          {"failures", failures},
                          {"all_pass", failures == 0}};
}

}  // namespace qmech
