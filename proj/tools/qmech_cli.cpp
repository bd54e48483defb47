#include "qmech/adversary.hpp"
#include "qmech/discretize.hpp"
#include "qmech/instance.hpp"
#include "qmech/mechanisms.hpp"
#include "qmech/oracle.hpp"
#include "qmech/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using namespace qmech;
using nlohmann::json;

std::vector<double> read_samples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open samples file " + path);
    std::vector<double> out;
    double v;
    while (in >> v) out.push_back(v);
    if (out.empty()) throw std::runtime_error("samples file " + path + " is empty");
    return out;
}

void write_output(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot open output file " + out_path);
        f << j.dump(2) << '\n';
    }
}

template <class T>
std::string scalar_str(const T& x) {
    if constexpr (scalar_traits<T>::exact)
        return format_rational(x);
    else
        return std::to_string(x);
}

template <class T>
json disc_json(const DiscretizedPrior<T>& d) {
    json atoms = json::array();
    for (std::size_t i = 0; i < d.pmf.size(); ++i)
        atoms.push_back({{"value", scalar_str(d.pmf.value(i))},
                         {"mass", scalar_str(d.pmf.mass(i))},
                         {"mass_float", scalar_traits<T>::to_double(d.pmf.mass(i))}});
    json gv = json::array(), gq = json::array();
    for (const auto& v : d.grid_values) gv.push_back(scalar_str(v));
    for (const auto& q : d.grid_quantiles) gq.push_back(scalar_str(q));
    return json{{"scheme", scheme_name(d.scheme)},
                {"delta", scalar_str(d.delta)},
                {"eps1", scalar_str(d.eps1)},
                {"H", scalar_str(d.H)},
                {"grid_values", gv},
                {"grid_quantiles", gq},
                {"pmf", atoms},
                {"value_queries", d.value_queries},
                {"quantile_queries", d.quantile_queries}};
}

template <class O>
json discretize_with(O& oracle, const std::string& scheme, const Rat& H, const Rat& delta,
                     const Rat& eps1) {
    using T = typename O::scalar;
    const T h = from_rat<T>(H);
    const T d = from_rat<T>(delta);
    const T e1 = from_rat<T>(eps1);
    if (scheme == "value") {
        if (!(H >= 1)) throw std::domain_error("value scheme needs --H >= 1");
        if (!(delta > 0)) throw std::domain_error("value scheme needs --delta > 0");
        return disc_json(discretize_value(oracle, h, d));
    }
    if (scheme == "quantile") {
        if (!(delta > 0)) throw std::domain_error("quantile scheme needs --delta > 0");
        if (!(eps1 > 0)) throw std::domain_error("quantile scheme needs --eps1 > 0");
        return disc_json(discretize_quantile(oracle, d, e1));
    }
    if (scheme == "quantile-uniform") {
        if (!(eps1 > 0)) throw std::domain_error("quantile-uniform scheme needs --eps1 > 0");
        return disc_json(discretize_quantile_uniform(oracle, e1));
    }
    throw std::domain_error("unknown scheme " + scheme);
}

json empirical_pmf_json(const std::vector<double>& samples) {
    std::map<double, long> counts;
    for (double s : samples) ++counts[s];
    json atoms = json::array();
    for (const auto& [v, c] : counts)
        atoms.push_back({{"value", v},
                         {"mass_float", static_cast<double>(c) / static_cast<double>(samples.size())}});
    return json{{"scheme", "empirical"},
                {"samples", samples.size()},
                {"pmf", atoms},
                {"value_queries", 0},
                {"quantile_queries", 0}};
}

int cmd_discretize(const std::string& instance_path, int pi, int pj,
                   const std::string& scheme, const std::string& h_str,
                   const std::string& delta_str, const std::string& eps1_str, long samples,
                   const std::string& samples_file, std::uint64_t seed,
                   const std::string& out_path) {
    const Rat H = h_str.empty() ? Rat(0) : parse_rational(h_str);
    const Rat delta = delta_str.empty() ? Rat(0) : parse_rational(delta_str);
    const Rat eps1 = eps1_str.empty() ? Rat(0) : parse_rational(eps1_str);

    std::vector<double> samples_vec;
    if (!samples_file.empty()) {
        samples_vec = read_samples_file(samples_file);
    } else if (samples > 0) {
        if (instance_path.empty())
            throw std::runtime_error("--samples needs --instance to draw from");
        auto inst = load_instance(instance_path);
        Rng rng(seed);
        samples_vec.resize(static_cast<std::size_t>(samples));
        for (auto& s : samples_vec) s = inst.marginal(pi, pj).sample(rng);
    }

    json out;
    if (scheme == "empirical") {
        if (samples_vec.empty())
            throw std::runtime_error("empirical scheme needs --samples or --samples-file");
        out = empirical_pmf_json(samples_vec);
    } else if (!samples_vec.empty()) {
        CountingOracle<EmpiricalSource> oracle{EmpiricalSource(std::move(samples_vec))};
        out = discretize_with(oracle, scheme, H, delta, eps1);
        out["oracle"] = "empirical";
    } else {
        if (instance_path.empty()) throw std::runtime_error("discretize needs --instance");
        auto inst = load_instance(instance_path);
        const auto& mg = inst.marginal(pi, pj);
        if (mg.is_discrete()) {
            const auto& pmf = mg.discrete();
            CountingOracle<PmfSource<Rat>> oracle{PmfSource<Rat>{&pmf}};
            out = discretize_with(oracle, scheme, H, delta, eps1);
            out["oracle"] = "exact";
        } else {
            CountingOracle<MarginalSource> oracle{MarginalSource(mg)};
            out = discretize_with(oracle, scheme, H, delta, eps1);
            out["oracle"] = "float";
        }
    }
    write_output(out, out_path);
    return 0;
}

RunOptions parse_run_options(const std::string& mech, const std::string& eps,
                             const std::string& h_str, const std::string& tail,
                             const std::string& bids, long trials, std::uint64_t seed,
                             const std::string& backend, const std::string& order,
                             long samples) {
    RunOptions opt;
    opt.spec.kind = mech_from_name(mech);
    opt.spec.eps = parse_rational(eps);
    if (!h_str.empty()) opt.spec.H = parse_rational(h_str);
    opt.spec.samples = samples;
    if (tail == "bounded") {
        opt.spec.tail = TailSpec::bounded();
    } else if (tail.rfind("eps1:", 0) == 0) {
        opt.spec.tail = TailSpec::explicit_eps1(parse_rational(tail.substr(5)));
    } else if (tail.rfind("file:", 0) == 0) {
        std::ifstream f(tail.substr(5));
        if (!f) throw std::runtime_error("cannot open tail file " + tail.substr(5));
        json j;
        f >> j;
        opt.spec.tail = tail_from_json(j);
    } else {
        throw std::runtime_error("--tail must be bounded, eps1:<rational>, or file:<path>");
    }
    if (bids == "enumerate") {
        opt.bids = "enumerate";
    } else if (bids == "mc") {
        opt.bids = "mc";
    } else if (bids.rfind("mc:", 0) == 0) {
        opt.bids = "mc";
        trials = std::stol(bids.substr(3));
    } else {
        throw std::runtime_error("--bids must be enumerate, mc, or mc:<trials>");
    }
    opt.trials = trials;
    opt.seed = seed;
    opt.backend = backend;
    if (order == "greedy-adversary")
        opt.order = CopiesOrder::GreedyAdversary;
    else if (order != "grouped")
        throw std::runtime_error("--order must be grouped or greedy-adversary");
    return opt;
}

int cmd_eval(const std::string& instance_path, const std::string& target,
             const std::string& order, const std::string& out_path) {
    auto inst = load_instance(instance_path);
    if (!inst.all_discrete())
        throw std::runtime_error("eval needs an all-discrete instance");
    auto pmfs = inst.pmfs<Rat>();
    json out{{"instance", inst.name}, {"target", target}};
    if (target == "mrs") {
        Rat v = eval_mrs_exact(pmfs, true);
        out["value"] = scalar_traits<Rat>::to_double(v);
        out["value_exact"] = format_rational(v);
    } else if (target == "ud") {
        CopiesOrder ord =
            order == "greedy-adversary" ? CopiesOrder::GreedyAdversary : CopiesOrder::Grouped;
        auto ev = eval_ud_exact(pmfs, inst.n, inst.m, ord, true, 1);
        out["value"] = scalar_traits<Rat>::to_double(ev.revenue);
        out["value_exact"] = format_rational(ev.revenue);
        json prices = json::array();
        for (const auto& p : ev.prices)
            prices.push_back(p ? json(format_rational(*p)) : json(nullptr));
        out["prices"] = prices;
    } else if (target == "im") {
        Rat v = eval_im_exact(pmfs, inst.n, inst.m, true);
        out["value"] = scalar_traits<Rat>::to_double(v);
        out["value_exact"] = format_rational(v);
    } else if (target == "bvcg") {
        Rat v = eval_bvcg_exact(pmfs, inst.n, inst.m);
        out["value"] = scalar_traits<Rat>::to_double(v);
        out["value_exact"] = format_rational(v);
    } else {
        throw std::runtime_error("--mech must be mrs, ud, im, or bvcg");
    }
    write_output(out, out_path);
    return 0;
}

json family_json(const IrregularFamily& fam) {
    json members = json::array();
    for (std::size_t z = 0; z < fam.dists.size(); ++z) {
        AuctionInstance inst;
        inst.name = "irregular-z" + std::to_string(z + 1);
        inst.n = 1;
        inst.m = 1;
        inst.val_class = ValClass::SingleItem;
        inst.marginals = {Marginal(fam.dists[z])};
        json mj = instance_to_json(inst);
        mj["opt_exact"] = format_rational(fam.opt_closed(static_cast<int>(z) + 1));
        members.push_back(std::move(mj));
    }
    json u = json::array(), q = json::array();
    for (const auto& x : fam.u) u.push_back(format_rational(x));
    for (const auto& x : fam.q) q.push_back(format_rational(x));
    return json{{"kind", "irregular"},
                {"c", fam.c},
                {"H", format_rational(fam.H)},
                {"s", fam.s},
                {"t", fam.t},
                {"k", fam.k},
                {"hardness_constant", fam.hardness_constant},
                {"u_chain", u},
                {"q_chain", q},
                {"members", members}};
}

json regular_pair_json(const RegularPair& rp) {
    auto wrap = [&](const Marginal& d, const std::string& name, const Rat& opt) {
        AuctionInstance inst;
        inst.name = name;
        inst.n = 1;
        inst.m = 1;
        inst.val_class = ValClass::SingleItem;
        inst.marginals = {d};
        json j = instance_to_json(inst);
        j["opt_exact"] = format_rational(opt);
        return j;
    };
    return json{{"kind", "regular"},
                {"eps", format_rational(rp.eps)},
                {"R", format_rational(rp.R)},
                {"t", rp.t},
                {"delta_eps", format_rational(rp.delta_eps)},
                {"q_t", format_rational(rp.q_t)},
                {"q_t1", format_rational(rp.q_t1)},
                {"vstar", format_rational(rp.vstar)},
                {"qstar", format_rational(rp.qstar)},
                {"members", json::array({wrap(rp.d1, "regular-pair-1", rp.opt1),
                                         wrap(rp.d2, "regular-pair-2", rp.opt2)})}};
}

int cmd_lowerbound(const std::string& kind, double c, const std::string& h_str,
                   int s, int t, const std::string& eps, const std::string& r_str,
                   int n, int m, int pi, int pj, const std::string& vc_name,
                   const std::string& marginal_path, const std::string& out_path) {
    json out;
    if (kind == "irregular") {
        Rat H = h_str.empty() ? irregular_min_H(c) : parse_rational(h_str);
        IrregularFamily fam =
            (s >= 0 && t >= 0) ? gen_irregular_family(c, H, s, t) : gen_irregular_family(c, H);
        out = family_json(fam);
    } else if (kind == "regular") {
        Rat R = r_str.empty() ? Rat(1) : parse_rational(r_str);
        out = regular_pair_json(gen_regular_pair(parse_rational(eps), R, t < 0 ? 1 : t));
    } else if (kind == "embed") {
        if (marginal_path.empty()) throw std::runtime_error("embed needs --marginal <file>");
        std::ifstream f(marginal_path);
        if (!f) throw std::runtime_error("cannot open marginal file " + marginal_path);
        json mj;
        f >> mj;
        auto inst = embed_multi_item(n, m, pi, pj, marginal_from_json(mj),
                                     val_class_from_name(vc_name));
        out = instance_to_json(inst);
    } else {
        throw std::runtime_error("--kind must be irregular, regular, or embed");
    }
    write_output(out, out_path);
    return 0;
}

int cmd_suite(const std::string& config_path, const std::string& csv_path,
              const std::string& json_path) {
    std::ifstream f(config_path);
    if (!f) throw std::runtime_error("cannot open config file " + config_path);
    json config;
    f >> config;
    auto res = run_suite(config);
    const std::string csv = suite_csv(res.rows);
    if (csv_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream c(csv_path);
        if (!c) throw std::runtime_error("cannot open csv output " + csv_path);
        c << csv;
    }
    if (!json_path.empty()) {
        std::ofstream j(json_path);
        if (!j) throw std::runtime_error("cannot open json output " + json_path);
        j << suite_json(res.rows).dump(2) << '\n';
    }
    long failures = 0;
    for (const auto& r : res.rows)
        if (!r.pass) ++failures;
    std::cerr << "suite: " << res.rows.size() << " rows, " << failures << " failures\n";
    return res.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"query-efficient auction mechanisms"};
    app.require_subcommand(1);

    auto* disc = app.add_subcommand("discretize", "discretize one marginal through an oracle");
    std::string d_instance, d_scheme, d_H, d_delta, d_eps1, d_samples_file, d_out;
    int d_i = 0, d_j = 0;
    long d_samples = 0;
    std::uint64_t d_seed = 1;
    disc->add_option("--instance", d_instance, "instance JSON file");
    disc->add_option("--i", d_i, "player index");
    disc->add_option("--j", d_j, "item index");
    disc->add_option("--scheme", d_scheme, "value | quantile | quantile-uniform | empirical")
        ->required();
    disc->add_option("--H", d_H, "value ceiling (rational)");
    disc->add_option("--delta", d_delta, "grid ratio minus one (rational)");
    disc->add_option("--eps1", d_eps1, "tail quantile (rational)");
    disc->add_option("--samples", d_samples, "draw this many samples and use them as the oracle");
    disc->add_option("--samples-file", d_samples_file, "whitespace-separated sample values");
    disc->add_option("--seed", d_seed, "sampling seed");
    disc->add_option("--out", d_out, "output file (default stdout)");

    auto* run = app.add_subcommand("run", "run one mechanism on one instance");
    std::string r_instance, r_mech, r_eps = "1", r_H, r_tail = "bounded";
    std::string r_bids = "enumerate", r_backend = "auto", r_order = "grouped", r_out;
    long r_trials = 100000, r_samples = 0;
    std::uint64_t r_seed = 1;
    bool r_json = false;
    run->add_option("--instance", r_instance, "instance JSON file")->required();
    run->add_option("--mech", r_mech,
                    "evm | evud | evbvcg | eva | eqm | equd | eqbvcg | eqa | emr | sm")
        ->required();
    run->add_option("--eps", r_eps, "approximation parameter (rational)");
    run->add_option("--H", r_H, "value ceiling (rational, default: instance max)");
    run->add_option("--tail", r_tail, "bounded | eps1:<rational> | file:<path>");
    run->add_option("--bids", r_bids, "enumerate | mc | mc:<trials>");
    run->add_option("--trials", r_trials, "mc trial count");
    run->add_option("--seed", r_seed, "seed");
    run->add_option("--backend", r_backend, "auto | exact | float");
    run->add_option("--order", r_order, "grouped | greedy-adversary");
    run->add_option("--samples", r_samples, "sm sample count");
    run->add_flag("--json", r_json, "emit JSON instead of CSV");
    run->add_option("--out", r_out, "output file (default stdout)");

    auto* ev = app.add_subcommand("eval", "exact benchmark evaluation on the true prior");
    std::string e_instance, e_target, e_order = "grouped", e_out;
    ev->add_option("--instance", e_instance, "instance JSON file")->required();
    ev->add_option("--mech", e_target, "mrs | ud | im | bvcg")->required();
    ev->add_option("--order", e_order, "grouped | greedy-adversary");
    ev->add_option("--out", e_out, "output file (default stdout)");

    auto* lb = app.add_subcommand("lowerbound", "generate adversarial instances");
    std::string l_kind, l_H, l_eps = "1/128", l_R, l_vc = "single_item", l_marginal, l_out;
    double l_c = 2.0;
    int l_s = -1, l_t = -1, l_n = 1, l_m = 1, l_i = 0, l_j = 0;
    lb->add_option("--kind", l_kind, "irregular | regular | embed")->required();
    lb->add_option("--c", l_c, "irregular family parameter (4c must be an integer)");
    lb->add_option("--H", l_H, "value ceiling (rational, default: smallest valid)");
    lb->add_option("--s", l_s, "hidden value interval index");
    lb->add_option("--t", l_t, "hidden quantile interval index / regular pair index");
    lb->add_option("--eps", l_eps, "regular pair epsilon (rational, < 1/64)");
    lb->add_option("--R", l_R, "regular pair revenue scale (rational)");
    lb->add_option("--n", l_n, "embed: player count");
    lb->add_option("--m", l_m, "embed: item count");
    lb->add_option("--i", l_i, "embed: planted player");
    lb->add_option("--j", l_j, "embed: planted item");
    lb->add_option("--val-class", l_vc, "embed: single_item | unit_demand | additive");
    lb->add_option("--marginal", l_marginal, "embed: marginal JSON file");
    lb->add_option("--out", l_out, "output file (default stdout)");

    auto* st = app.add_subcommand("suite", "run a config-driven evaluation suite");
    std::string s_config, s_csv, s_json;
    st->add_option("--config", s_config, "suite config JSON")->required();
    st->add_option("--csv", s_csv, "CSV output file (default stdout)");
    st->add_option("--json-out", s_json, "JSON output file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (disc->parsed())
            return cmd_discretize(d_instance, d_i, d_j, d_scheme, d_H, d_delta, d_eps1,
                                  d_samples, d_samples_file, d_seed, d_out);
        if (run->parsed()) {
            auto opt = parse_run_options(r_mech, r_eps, r_H, r_tail, r_bids, r_trials, r_seed,
                                         r_backend, r_order, r_samples);
            auto inst = load_instance(r_instance);
            auto rep = run_mechanism(inst, opt);
            if (r_json) {
                write_output(report_json(rep), r_out);
            } else if (r_out.empty()) {
                std::cout << report_csv_header() << '\n' << report_csv_row(rep) << '\n';
            } else {
                std::ofstream f(r_out);
                f << report_csv_header() << '\n' << report_csv_row(rep) << '\n';
            }
            return 0;
        }
        if (ev->parsed()) return cmd_eval(e_instance, e_target, e_order, e_out);
        if (lb->parsed())
            return cmd_lowerbound(l_kind, l_c, l_H, l_s, l_t, l_eps, l_R, l_n, l_m, l_i, l_j,
                                  l_vc, l_marginal, l_out);
        if (st->parsed()) return cmd_suite(s_config, s_csv, s_json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
