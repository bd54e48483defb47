#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmech/myerson.hpp"
#include "qmech/pmf.hpp"
#include "qmech/rng.hpp"

#include <vector>

using namespace qmech;

namespace {

DiscretePmf<Rat> rat_pmf(std::vector<std::pair<Rat, Rat>> atoms) {
    return DiscretePmf<Rat>::from_atoms(std::move(atoms));
}

DiscretePmf<Rat> random_pmf(Rng& rng, long hi, int max_atoms, long denom) {
    const int k = static_cast<int>(rng.uniform_int(1, max_atoms));
    long total = 0;
    std::vector<long> w(static_cast<std::size_t>(k));
    for (auto& x : w) {
        x = rng.uniform_int(1, denom);
        total += x;
    }
    std::vector<std::pair<Rat, Rat>> atoms;
    for (int i = 0; i < k; ++i)
        atoms.emplace_back(Rat(rng.uniform_int(1, hi)),
                           Rat(w[static_cast<std::size_t>(i)]) / Rat(total));
    return DiscretePmf<Rat>::from_atoms(std::move(atoms));
}

}  // namespace

TEST_CASE("virtual values on a two-point prior") {
    auto t = build_virtual_table(rat_pmf({{Rat(1), Rat(1) / 2}, {Rat(3), Rat(1) / 2}}));
    REQUIRE(t.raw.size() == 2);
    CHECK(t.raw[0] == Rat(-1));
    CHECK(t.raw[1] == Rat(3));
    CHECK(t.ironed[0] == Rat(-1));
    CHECK(t.ironed[1] == Rat(3));
}

TEST_CASE("ironing flattens the non-concave middle atom") {
    auto t = build_virtual_table(
        rat_pmf({{Rat(1), Rat(1) / 3}, {Rat(2), Rat(1) / 3}, {Rat(4), Rat(1) / 3}}));
    REQUIRE(t.ironed.size() == 3);
    CHECK(t.ironed[0] == Rat(-1));
    CHECK(t.ironed[1] == Rat(0));
    CHECK(t.ironed[2] == Rat(4));

    // ironed virtuals never decrease in the value
    for (std::size_t l = 0; l + 1 < t.ironed.size(); ++l)
        CHECK(t.ironed[l] <= t.ironed[l + 1]);
}

TEST_CASE("ironed virtual surplus equals optimal revenue") {
    auto d = rat_pmf({{Rat(1), Rat(1) / 3}, {Rat(2), Rat(1) / 3}, {Rat(4), Rat(1) / 3}});
    std::vector<DiscretePmf<Rat>> one{d};
    CHECK(optimal_revenue_single_item(one) == Rat(4) / 3);
    CHECK(ironed_surplus_bound(one) == Rat(4) / 3);

    std::vector<DiscretePmf<Rat>> pair{
        rat_pmf({{Rat(1), Rat(1) / 2}, {Rat(3), Rat(1) / 2}}),
        rat_pmf({{Rat(1), Rat(1) / 2}, {Rat(3), Rat(1) / 2}})};
    CHECK(optimal_revenue_single_item(pair) == ironed_surplus_bound(pair));
}

TEST_CASE("the surplus identity holds on random priors") {
    Rng rng(101);
    for (int it = 0; it < 40; ++it) {
        const int n = static_cast<int>(rng.uniform_int(1, 3));
        std::vector<DiscretePmf<Rat>> priors;
        for (int i = 0; i < n; ++i) priors.push_back(random_pmf(rng, 20, 5, 10));
        CHECK(optimal_revenue_single_item(priors) == ironed_surplus_bound(priors));
    }
}

TEST_CASE("single-player optimal auction is the monopoly price") {
    std::vector<DiscretePmf<Rat>> one{rat_pmf({{Rat(1), Rat(1) / 2}, {Rat(3), Rat(1) / 2}})};
    CHECK(optimal_revenue_single_item(one) == Rat(3) / 2);

    Rng rng(102);
    for (int it = 0; it < 40; ++it) {
        auto d = random_pmf(rng, 30, 6, 12);
        std::vector<DiscretePmf<Rat>> v{d};
        auto pp = optimal_posted_price(d, Rat(0));
        CHECK(optimal_revenue_single_item(v) == pp.revenue);
    }
}

TEST_CASE("posted price respects the floor and prefers the smallest maximizer") {
    auto d = rat_pmf({{Rat(1), Rat(1) / 2}, {Rat(3), Rat(1) / 2}});
    auto a = optimal_posted_price(d, Rat(0));
    CHECK(a.price == Rat(3));
    CHECK(a.revenue == Rat(3) / 2);

    auto b = optimal_posted_price(d, Rat(2));
    CHECK(b.price == Rat(3));
    CHECK(b.revenue == Rat(3) / 2);

    // both support prices give revenue 1; the smaller price wins the tie
    auto e = rat_pmf({{Rat(1), Rat(1) / 2}, {Rat(2), Rat(1) / 2}});
    auto c = optimal_posted_price(e, Rat(0));
    CHECK(c.price == Rat(1));
    CHECK(c.revenue == Rat(1));

    // a floor strictly above the support sells nothing
    auto f = optimal_posted_price(e, Rat(5));
    CHECK(f.revenue == Rat(0));
}

TEST_CASE("allocation goes to the highest nonnegative ironed virtual") {
    std::vector<VirtualTable<Rat>> tabs{
        build_virtual_table(rat_pmf({{Rat(1), Rat(1) / 2}, {Rat(3), Rat(1) / 2}})),
        build_virtual_table(rat_pmf({{Rat(2), Rat(1) / 2}, {Rat(8), Rat(1) / 2}}))};

    auto both_high = mrs_outcome(tabs, {Rat(3), Rat(8)});
    CHECK(both_high.winner == 1);  // virtuals 3 vs 8
    CHECK(both_high.payment == Rat(8));

    auto only_first = mrs_outcome(tabs, {Rat(3), Rat(2)});
    CHECK(only_first.winner == 0);
    CHECK(only_first.payment == Rat(3));

    auto nobody = mrs_outcome(tabs, {Rat(1), Rat(2)});
    CHECK(nobody.winner == -1);
}

TEST_CASE("ties in ironed virtuals go to the lowest player index") {
    auto d = rat_pmf({{Rat(1), Rat(1) / 2}, {Rat(3), Rat(1) / 2}});
    std::vector<VirtualTable<Rat>> tabs{build_virtual_table(d), build_virtual_table(d)};
    auto o = mrs_outcome(tabs, {Rat(3), Rat(3)});
    CHECK(o.winner == 0);
    CHECK(o.payment == Rat(3));
}

TEST_CASE("off-grid bids project down and below-grid bids are excluded") {
    auto d = rat_pmf({{Rat(2), Rat(1) / 2}, {Rat(5), Rat(1) / 2}});
    std::vector<VirtualTable<Rat>> tabs{build_virtual_table(d)};

    auto mid = mrs_outcome(tabs, {Rat(4)});  // projects to 2, virtual -1
    CHECK(mid.winner == -1);

    auto high = mrs_outcome(tabs, {Rat(100)});  // projects to 5
    CHECK(high.winner == 0);
    CHECK(high.payment == Rat(5));

    auto low = mrs_outcome(tabs, {Rat(1)});  // below the whole support
    CHECK(low.winner == -1);
}

TEST_CASE("truthful bidding is a best response against fixed opponents") {
    // DSIC spot check by exhaustive deviation: utility(truth) >= utility(lie)
    Rng rng(103);
    for (int it = 0; it < 15; ++it) {
        const int n = static_cast<int>(rng.uniform_int(2, 3));
        std::vector<DiscretePmf<Rat>> priors;
        std::vector<VirtualTable<Rat>> tabs;
        for (int i = 0; i < n; ++i) {
            priors.push_back(random_pmf(rng, 12, 4, 8));
            tabs.push_back(build_virtual_table(priors.back()));
        }
        for_each_profile(priors, [&](const std::vector<Rat>& vals, const Rat&) {
            for (std::size_t i = 0; i < vals.size(); ++i) {
                auto truth = mrs_outcome(tabs, vals);
                Rat u_truth = (truth.winner == static_cast<int>(i))
                                  ? vals[i] - truth.payment
                                  : Rat(0);
                CHECK(u_truth >= Rat(0));
                for (std::size_t l = 0; l < priors[i].size(); ++l) {
                    auto lie_vals = vals;
                    lie_vals[i] = priors[i].value(l);
                    auto lie = mrs_outcome(tabs, lie_vals);
                    Rat u_lie = (lie.winner == static_cast<int>(i))
                                    ? vals[i] - lie.payment
                                    : Rat(0);
                    CHECK(u_truth >= u_lie);
                }
            }
        });
    }
}

TEST_CASE("winner payment is the threshold bid") {
    Rng rng(104);
    for (int it = 0; it < 20; ++it) {
        const int n = static_cast<int>(rng.uniform_int(2, 3));
        std::vector<DiscretePmf<Rat>> priors;
        std::vector<VirtualTable<Rat>> tabs;
        for (int i = 0; i < n; ++i) {
            priors.push_back(random_pmf(rng, 12, 4, 8));
            tabs.push_back(build_virtual_table(priors.back()));
        }
        for_each_profile(priors, [&](const std::vector<Rat>& vals, const Rat&) {
            auto o = mrs_outcome(tabs, vals);
            if (o.winner < 0) return;
            const auto w = static_cast<std::size_t>(o.winner);
            CHECK(o.payment <= vals[w]);
            // bidding exactly the payment still wins; any support value below loses
            auto at = vals;
            at[w] = o.payment;
            CHECK(mrs_outcome(tabs, at).winner == o.winner);
            for (std::size_t l = 0; l < priors[w].size(); ++l) {
                if (!(priors[w].value(l) < o.payment)) break;
                auto below = vals;
                below[w] = priors[w].value(l);
                CHECK(mrs_outcome(tabs, below).winner != o.winner);
            }
        });
    }
}
