#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmech/coupling.hpp"
#include "qmech/discretize.hpp"
#include "qmech/oracle.hpp"
#include "qmech/pmf.hpp"
#include "qmech/rng.hpp"

#include <vector>

using namespace qmech;

namespace {

DiscretePmf<Rat> rat_pmf(std::vector<std::pair<Rat, Rat>> atoms) {
    return DiscretePmf<Rat>::from_atoms(std::move(atoms));
}

DiscretePmf<Rat> random_pmf(Rng& rng, long lo, long hi, int max_atoms, long denom) {
    const int k = static_cast<int>(rng.uniform_int(1, max_atoms));
    long total = 0;
    std::vector<long> w(static_cast<std::size_t>(k));
    for (auto& x : w) {
        x = rng.uniform_int(1, denom);
        total += x;
    }
    std::vector<std::pair<Rat, Rat>> atoms;
    for (int i = 0; i < k; ++i)
        atoms.emplace_back(Rat(rng.uniform_int(lo, hi)),
                           Rat(w[static_cast<std::size_t>(i)]) / Rat(total));
    return DiscretePmf<Rat>::from_atoms(std::move(atoms));
}

bool rows_sum_to_one(const TransitionMatrix<Rat>& k) {
    for (const auto& row : k.prob) {
        Rat s(0);
        for (const auto& p : row) {
            if (p < Rat(0)) return false;
            s += p;
        }
        if (s != Rat(1)) return false;
    }
    return true;
}

bool pmfs_equal(const DiscretePmf<Rat>& a, const DiscretePmf<Rat>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t l = 0; l < a.size(); ++l)
        if (a.value(l) != b.value(l) || a.mass(l) != b.mass(l)) return false;
    return true;
}

}  // namespace

TEST_CASE("round-down kernel reproduces the worked example") {
    auto src = rat_pmf({{Rat(1), Rat(2) / 5}, {Rat(2), Rat(3) / 10}, {Rat(5), Rat(3) / 10}});
    auto grid = rat_pmf({{Rat(1), Rat(7) / 10}, {Rat(5), Rat(3) / 10}});

    auto k = round_down_matrix(src, grid);
    CHECK(rows_sum_to_one(k));
    CHECK(k.prob[0][0] == Rat(1));  // 1 stays at 1
    CHECK(k.prob[1][0] == Rat(1));  // 2 is strictly between grid points, drops
    CHECK(k.prob[2][1] == Rat(1));  // 5 sits on the grid with matching tails

    auto push = k.pushforward(src);
    CHECK(pmfs_equal(push, grid));
}

TEST_CASE("round-down splits mass at shared support points") {
    // src has 1/2 at value 2 with tail 3/4 there; the grid keeps tail 11/20,
    // so the on-grid atom must drop with probability (3/4 - 11/20) / (1/2)
    auto src = rat_pmf({{Rat(1), Rat(1) / 4}, {Rat(2), Rat(1) / 2}, {Rat(4), Rat(1) / 4}});
    auto grid = rat_pmf({{Rat(1), Rat(9) / 20}, {Rat(2), Rat(3) / 10}, {Rat(4), Rat(1) / 4}});

    auto k = round_down_matrix(src, grid);
    CHECK(rows_sum_to_one(k));
    CHECK(k.prob[1][0] == Rat(2) / 5);
    CHECK(k.prob[1][1] == Rat(3) / 5);
    CHECK(pmfs_equal(k.pushforward(src), grid));
}

TEST_CASE("resample kernel inverts the value discretization") {
    auto src = rat_pmf({{Rat(1), Rat(2) / 5}, {Rat(2), Rat(3) / 10}, {Rat(5), Rat(3) / 10}});
    auto grid = rat_pmf({{Rat(1), Rat(7) / 10}, {Rat(5), Rat(3) / 10}});

    auto k = resample_matrix(src, grid);
    CHECK(rows_sum_to_one(k));
    // from grid point 1: stay at 1 wp 4/7, move into the interior atom 2 wp 3/7
    CHECK(k.prob[0][0] == Rat(4) / 7);
    CHECK(k.prob[0][1] == Rat(3) / 7);
    CHECK(k.prob[0][2] == Rat(0));
    // the top grid point has no interior above it here
    CHECK(k.prob[1][2] == Rat(1));

    CHECK(pmfs_equal(k.pushforward(grid), src));
}

TEST_CASE("resample kernel requires grid support inside the source support") {
    auto src = rat_pmf({{Rat(1), Rat(1) / 2}, {Rat(4), Rat(1) / 2}});
    auto grid = rat_pmf({{Rat(2), Rat(1)}});
    CHECK_THROWS_AS(resample_matrix(src, grid), std::domain_error);
}

TEST_CASE("both kernels are exact inverses across random value discretizations") {
    Rng rng(57);
    int done = 0;
    for (int it = 0; it < 240 && done < 50; ++it) {
        long hi = rng.uniform_int(2, 64);
        auto src = random_pmf(rng, 1, hi, 7, 12);
        Rat delta = Rat(rng.uniform_int(1, 6)) / Rat(rng.uniform_int(1, 3));
        CountingOracle<PmfSource<Rat>> o{PmfSource<Rat>{&src}};
        auto disc = discretize_value(o, Rat(hi), delta);

        auto down = round_down_matrix(src, disc.pmf);
        CHECK(rows_sum_to_one(down));
        CHECK(pmfs_equal(down.pushforward(src), disc.pmf));

        // the value grid keeps only grid points carrying mass; those are all
        // round-down images, so they may sit between source atoms.  The
        // resample kernel needs grid support inside the source support, which
        // holds whenever every grid atom value is a source value.
        bool embeddable = true;
        for (std::size_t l = 0; l < disc.pmf.size(); ++l)
            if (src.mass_at(disc.pmf.value(l)) == Rat(0)) embeddable = false;
        if (!embeddable) continue;

        auto up = resample_matrix(src, disc.pmf);
        CHECK(rows_sum_to_one(up));
        CHECK(pmfs_equal(up.pushforward(disc.pmf), src));
        ++done;
    }
    CHECK(done >= 10);
}

TEST_CASE("quantile discretizations always embed, so both directions are exact") {
    Rng rng(58);
    for (int it = 0; it < 50; ++it) {
        auto src = random_pmf(rng, 1, 100, 7, 12);
        Rat delta = Rat(rng.uniform_int(1, 4)) / Rat(rng.uniform_int(2, 4));
        Rat eps1 = Rat(1) / Rat(rng.uniform_int(2, 128));
        CountingOracle<PmfSource<Rat>> o{PmfSource<Rat>{&src}};
        auto disc = discretize_quantile(o, delta, eps1);

        auto up = resample_matrix(src, disc.pmf);
        CHECK(rows_sum_to_one(up));
        CHECK(pmfs_equal(up.pushforward(disc.pmf), src));
    }
}

TEST_CASE("deterministic round-down for continuous draws") {
    std::vector<double> grid{1.0, 2.0, 4.0};
    CHECK(round_down_value(3.5, grid) == doctest::Approx(2.0));
    CHECK(round_down_value(4.0, grid) == doctest::Approx(4.0));
    CHECK(round_down_value(100.0, grid) == doctest::Approx(4.0));
    CHECK(round_down_value(0.5, grid) == doctest::Approx(1.0));
}

TEST_CASE("row sampling follows the kernel probabilities") {
    auto src = rat_pmf({{Rat(1), Rat(2) / 5}, {Rat(2), Rat(3) / 10}, {Rat(5), Rat(3) / 10}});
    auto grid = rat_pmf({{Rat(1), Rat(7) / 10}, {Rat(5), Rat(3) / 10}});
    auto k = resample_matrix(src, grid);

    Rng rng(91);
    int into_interior = 0;
    const int trials = 30000;
    for (int i = 0; i < trials; ++i)
        if (sample_row(k.prob[0], rng) == 1) ++into_interior;
    CHECK(std::abs(into_interior / static_cast<double>(trials) - 3.0 / 7.0) < 0.02);
}
