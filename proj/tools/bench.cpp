#include "qmech/myerson.hpp"
#include "qmech/pmf.hpp"
#include "qmech/revenue.hpp"
#include "qmech/rng.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

using namespace qmech;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

struct BenchRow {
    const char* name;
    double serial_ms;
    double parallel_ms;
    bool equal;
};

void print_row(const BenchRow& r) {
    std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   bit-equal %s\n",
                r.name, r.serial_ms, r.parallel_ms, r.serial_ms / r.parallel_ms,
                r.equal ? "yes" : "NO");
}

DiscretePmf<double> random_pmf(Rng& rng, int atoms, double hi) {
    std::vector<std::pair<double, double>> as;
    double total = 0;
    std::vector<double> w(static_cast<std::size_t>(atoms));
    for (auto& x : w) {
        x = rng.uniform01() + 0.05;
        total += x;
    }
    double v = 1.0;
    for (int a = 0; a < atoms; ++a) {
        v += rng.uniform01() * hi / atoms;
        as.emplace_back(v, w[static_cast<std::size_t>(a)] / total);
    }
    return DiscretePmf<double>::from_atoms(std::move(as));
}

}  // namespace

int main() {
    std::printf("threads available: %d\n", omp_get_max_threads());

    Rng rng(42);
    const int n = 7, atoms = 8;
    std::vector<DiscretePmf<double>> priors;
    std::vector<VirtualTable<double>> tabs;
    for (int i = 0; i < n; ++i) {
        priors.push_back(random_pmf(rng, atoms, 50.0));
        tabs.push_back(build_virtual_table(priors.back()));
    }
    std::vector<const DiscretePmf<double>*> ptrs;
    for (const auto& p : priors) ptrs.push_back(&p);

    auto revenue_f = [&](const std::vector<double>& vals) {
        auto o = mrs_outcome(tabs, vals);
        return o.winner >= 0 ? o.payment : 0.0;
    };

    {
        double t0 = now_ms();
        double rs = expect_over_profiles(ptrs, revenue_f, false);
        double t1 = now_ms();
        double rp = expect_over_profiles(ptrs, revenue_f, true);
        double t2 = now_ms();
        print_row({"profile expectation (8^7)", t1 - t0, t2 - t1, bit_equal(rs, rp)});
        std::printf("  revenue = %.17g\n", rs);
    }

    {
        const long trials = 2000000;
        auto trial_f = [&](Rng& r) {
            double best = 0;
            for (const auto& p : priors) {
                double v = p.value(static_cast<std::size_t>(
                    r.uniform_int(0, static_cast<long>(p.size()) - 1)));
                if (v > best) best = v;
            }
            return best;
        };
        double t0 = now_ms();
        auto ms = mc_mean(trials, 7, trial_f, false);
        double t1 = now_ms();
        auto mp = mc_mean(trials, 7, trial_f, true);
        double t2 = now_ms();
        print_row({"mc mean (2e6 trials)", t1 - t0, t2 - t1,
                   bit_equal(ms.mean, mp.mean) && bit_equal(ms.se, mp.se)});
        std::printf("  mean = %.17g   se = %.3g\n", ms.mean, ms.se);
    }

    return 0;
}
