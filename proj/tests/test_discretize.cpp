#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmech/discretize.hpp"
#include "qmech/oracle.hpp"
#include "qmech/pmf.hpp"
#include "qmech/rng.hpp"

#include <vector>

using namespace qmech;

namespace {

DiscretePmf<Rat> uniform_support(long lo, long hi) {
    std::vector<std::pair<Rat, Rat>> atoms;
    const long n = hi - lo + 1;
    for (long v = lo; v <= hi; ++v) atoms.emplace_back(Rat(v), Rat(1) / Rat(n));
    return DiscretePmf<Rat>::from_atoms(std::move(atoms));
}

DiscretePmf<Rat> random_pmf_in(Rng& rng, long lo, long hi, int max_atoms, long denom) {
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

}  // namespace

TEST_CASE("value grid on a uniform support") {
    auto d = uniform_support(1, 8);
    CountingOracle<PmfSource<Rat>> o{PmfSource<Rat>{&d}};
    auto out = discretize_value(o, Rat(8), Rat(1));

    CHECK(out.scheme == Scheme::Value);
    CHECK(out.grid_values == std::vector<Rat>{Rat(1), Rat(2), Rat(4), Rat(8)});
    CHECK(out.value_queries == 4);
    CHECK(o.value_queries() == 4);
    CHECK(o.quantile_queries() == 0);

    CHECK(out.pmf.size() == 4);
    CHECK(out.pmf.mass_at(Rat(1)) == Rat(1) / 8);
    CHECK(out.pmf.mass_at(Rat(2)) == Rat(1) / 4);
    CHECK(out.pmf.mass_at(Rat(4)) == Rat(1) / 2);
    CHECK(out.pmf.mass_at(Rat(8)) == Rat(1) / 8);
}

TEST_CASE("value grid rejects support below 1") {
    auto d = DiscretePmf<Rat>::from_atoms({{Rat(1) / 2, Rat(1) / 2}, {Rat(2), Rat(1) / 2}});
    CountingOracle<PmfSource<Rat>> o{PmfSource<Rat>{&d}};
    CHECK_THROWS_AS(discretize_value(o, Rat(2), Rat(1)), std::domain_error);
}

TEST_CASE("geometric quantile grid on the uniform interval") {
    ContinuousDist u = UniformDist{0, 1};
    CountingOracle<ContSource> o{ContSource{&u}};
    auto out = discretize_quantile(o, 1.0, 0.25);

    CHECK(out.scheme == Scheme::QuantileGeometric);
    REQUIRE(out.grid_quantiles.size() == 3);
    CHECK(out.grid_quantiles[0] == doctest::Approx(1.0));
    CHECK(out.grid_quantiles[1] == doctest::Approx(0.5));
    CHECK(out.grid_quantiles[2] == doctest::Approx(0.25));
    CHECK(out.quantile_queries == 3);
    CHECK(o.quantile_queries() == 3);

    REQUIRE(out.pmf.size() == 3);
    CHECK(out.pmf.value(0) == doctest::Approx(0.0));
    CHECK(out.pmf.mass(0) == doctest::Approx(0.5));
    CHECK(out.pmf.value(1) == doctest::Approx(0.5));
    CHECK(out.pmf.mass(1) == doctest::Approx(0.25));
    CHECK(out.pmf.value(2) == doctest::Approx(0.75));
    CHECK(out.pmf.mass(2) == doctest::Approx(0.25));
}

TEST_CASE("quantile grids merge equal answers") {
    auto d = DiscretePmf<Rat>::from_atoms({{Rat(3), Rat(1)}});
    CountingOracle<PmfSource<Rat>> o{PmfSource<Rat>{&d}};
    auto out = discretize_quantile(o, Rat(1), Rat(1) / 8);
    CHECK(out.quantile_queries == 4);
    CHECK(out.pmf.size() == 1);
    CHECK(out.pmf.value(0) == Rat(3));
    CHECK(out.pmf.mass(0) == Rat(1));
}

TEST_CASE("uniform quantile grid") {
    ContinuousDist u = UniformDist{0, 1};
    CountingOracle<ContSource> o{ContSource{&u}};
    auto out = discretize_quantile_uniform(o, 0.25);

    CHECK(out.scheme == Scheme::QuantileUniform);
    CHECK(out.quantile_queries == 5);  // k+1 probes even when the top repeats
    REQUIRE(out.pmf.size() == 4);
    CHECK(out.pmf.value(0) == doctest::Approx(0.0));
    CHECK(out.pmf.mass(0) == doctest::Approx(0.25));
    CHECK(out.pmf.value(3) == doctest::Approx(0.75));
    CHECK(out.pmf.mass(3) == doctest::Approx(0.25));
}

TEST_CASE("explicit grids honour the exact exponent count") {
    auto d = uniform_support(1, 8);
    CountingOracle<PmfSource<Rat>> o{PmfSource<Rat>{&d}};
    auto grid = value_grid_geometric(Rat(2), Rat(8), 3);
    CHECK(grid == std::vector<Rat>{Rat(1), Rat(2), Rat(4), Rat(8)});
    auto out = discretize_value_grid(o, grid, Rat(8), Rat(1));
    CHECK(out.value_queries == 4);

    auto gq = quantile_grid_geometric(Rat(2), Rat(1) / 8, 3);
    CHECK(gq == std::vector<Rat>{Rat(1), Rat(1) / 2, Rat(1) / 4, Rat(1) / 8});
    auto gu = quantile_grid_uniform(Rat(1) / 4, 4);
    CHECK(gu == std::vector<Rat>{Rat(1), Rat(1), Rat(3) / 4, Rat(1) / 2, Rat(1) / 4});
}

TEST_CASE("value grid counts match the closed form over parameter sweeps") {
    Rng rng(31);
    for (int it = 0; it < 40; ++it) {
        long hi = rng.uniform_int(2, 60);
        auto d = random_pmf_in(rng, 1, hi, 6, 10);
        Rat H(hi);
        Rat delta = Rat(rng.uniform_int(1, 8)) / Rat(rng.uniform_int(1, 8));
        CountingOracle<PmfSource<Rat>> o{PmfSource<Rat>{&d}};
        auto out = discretize_value(o, H, delta);
        long k = ceil_log_ratio(Rat(1) + delta, H);
        CHECK(o.value_queries() == k + 1);
        CHECK(out.pmf.total() == Rat(1));
    }
}

TEST_CASE("value rounding moves mass down, never up") {
    Rng rng(32);
    for (int it = 0; it < 40; ++it) {
        long hi = rng.uniform_int(2, 50);
        auto d = random_pmf_in(rng, 1, hi, 6, 10);
        Rat delta = Rat(rng.uniform_int(1, 5));
        CountingOracle<PmfSource<Rat>> o{PmfSource<Rat>{&d}};
        auto out = discretize_value(o, Rat(hi), delta);

        // the original ccdf dominates the rounded one pointwise
        for (std::size_t l = 0; l < out.pmf.size(); ++l) {
            const Rat& g = out.pmf.value(l);
            CHECK(d.ccdf(g) >= out.pmf.ccdf(g));
        }
        // every rounded value is a grid point at most (1+delta) below a source value
        for (std::size_t l = 0; l < out.pmf.size(); ++l) {
            const Rat& g = out.pmf.value(l);
            bool covered = false;
            for (std::size_t s = 0; s < d.size(); ++s)
                if (d.value(s) >= g && d.value(s) < g * (Rat(1) + delta) + Rat(1, 1000000000))
                    covered = true;
            CHECK(covered);
        }
    }
}

TEST_CASE("quantile discretization never loses the tail mass bookkeeping") {
    Rng rng(33);
    for (int it = 0; it < 40; ++it) {
        auto d = random_pmf_in(rng, 1, 100, 6, 10);
        Rat delta = Rat(rng.uniform_int(1, 4)) / Rat(rng.uniform_int(2, 5));
        if (delta <= 0) continue;
        Rat eps1 = Rat(1) / Rat(rng.uniform_int(2, 64));
        CountingOracle<PmfSource<Rat>> o{PmfSource<Rat>{&d}};
        auto out = discretize_quantile(o, delta, eps1);
        long k = ceil_log_ratio(Rat(1) + delta, Rat(1) / eps1);
        CHECK(o.quantile_queries() == k + 1);
        CHECK(out.pmf.total() == Rat(1));
        // every discretized value is a source support value
        for (std::size_t l = 0; l < out.pmf.size(); ++l)
            CHECK(d.mass_at(out.pmf.value(l)) > Rat(0));
    }
}

TEST_CASE("empirical oracle feeds the quantile scheme") {
    std::vector<double> samples;
    Rng rng(41);
    for (int i = 0; i < 100000; ++i) samples.push_back(rng.uniform01());
    CountingOracle<EmpiricalSource> o{EmpiricalSource(std::move(samples))};
    auto out = discretize_quantile(o, 0.5, 1.0 / 16.0);

    CHECK(out.pmf.total() == doctest::Approx(1.0).epsilon(1e-9));
    // answered values sit near the true uniform quantiles
    for (std::size_t l = 0; l < out.grid_quantiles.size(); ++l) {
        double q = out.grid_quantiles[l];
        CHECK(std::abs(out.grid_values[l] - (1.0 - q)) < 0.02);
    }
}

TEST_CASE("scheme parameter validation") {
    auto d = uniform_support(1, 4);
    CountingOracle<PmfSource<Rat>> o{PmfSource<Rat>{&d}};
    CHECK_THROWS_AS(discretize_value(o, Rat(1) / 2, Rat(1)), std::domain_error);
    CHECK_THROWS_AS(discretize_value(o, Rat(4), Rat(0)), std::domain_error);
    CHECK_THROWS_AS(discretize_quantile(o, Rat(1), Rat(0)), std::domain_error);
    CHECK_THROWS_AS(discretize_quantile(o, Rat(1), Rat(2)), std::domain_error);
    CHECK_THROWS_AS(discretize_quantile_uniform(o, Rat(0)), std::domain_error);
}
