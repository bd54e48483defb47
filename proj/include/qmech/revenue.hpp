#pragma once

#include "qmech/pmf.hpp"
#include "qmech/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qmech {

inline constexpr std::uint64_t kProfileChunk = 4096;

template <class T>
std::uint64_t profile_space_size(const std::vector<const DiscretePmf<T>*>& priors) {
    std::uint64_t total = 1;
    for (const auto* p : priors) {
        if (p->size() != 0 && total > (std::uint64_t(1) << 60) / p->size())
            throw std::domain_error("profile space too large to enumerate");
        total *= p->size();
    }
    return total;
}

// Weighted expectation of f over the product of the given pmfs.  Work is
// split into fixed-size chunks; partial sums are merged in chunk order, so
// the result is identical for any thread count (serial run included).
template <class T, class F>
T expect_over_profiles(const std::vector<const DiscretePmf<T>*>& priors, F&& f,
                       bool parallel = true) {
    const std::size_t d = priors.size();
    const std::uint64_t total = profile_space_size(priors);
    const std::int64_t nchunks =
        static_cast<std::int64_t>((total + kProfileChunk - 1) / kProfileChunk);
    std::vector<T> partial(static_cast<std::size_t>(nchunks), T(0));

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::int64_t ci = 0; ci < nchunks; ++ci) {
        const std::uint64_t start = static_cast<std::uint64_t>(ci) * kProfileChunk;
        const std::uint64_t stop = std::min(total, start + kProfileChunk);

        std::vector<std::size_t> idx(d, 0);
        std::uint64_t r = start;
        for (std::size_t j = d; j-- > 0;) {
            idx[j] = static_cast<std::size_t>(r % priors[j]->size());
            r /= priors[j]->size();
        }
        // pref[j] = product of the first j digit masses; keeps odometer steps
        // from recomputing the whole weight.
        std::vector<T> pref(d + 1, T(1));
        std::vector<T> vals(d);
        for (std::size_t j = 0; j < d; ++j) {
            vals[j] = priors[j]->value(idx[j]);
            pref[j + 1] = pref[j] * priors[j]->mass(idx[j]);
        }

        T acc(0);
        for (std::uint64_t it = start; it < stop; ++it) {
            acc += pref[d] * f(vals);
            if (it + 1 == stop) break;
            std::size_t j = d;
            while (j-- > 0) {
                if (++idx[j] < priors[j]->size()) break;
                idx[j] = 0;
            }
            for (std::size_t t = j; t < d; ++t) {
                vals[t] = priors[t]->value(idx[t]);
                pref[t + 1] = pref[t] * priors[t]->mass(idx[t]);
            }
        }
        partial[static_cast<std::size_t>(ci)] = acc;
    }

    T sum(0);
    for (const auto& p : partial) sum += p;
    return sum;
}

struct MeanStderr {
    double mean = 0;
    double se = 0;
    long trials = 0;
};

// Monte Carlo mean of f over independently seeded trials.  Each trial owns an
// Rng derived from (seed, trial index), and chunk partials are merged in
// order, so the estimate is reproducible for any thread count.
template <class F>
MeanStderr mc_mean(long trials, std::uint64_t seed, F&& f, bool parallel = true) {
    if (trials < 2) throw std::domain_error("mc_mean: needs at least 2 trials");
    const std::int64_t nchunks =
        (trials + static_cast<std::int64_t>(kProfileChunk) - 1) /
        static_cast<std::int64_t>(kProfileChunk);
    std::vector<double> sums(static_cast<std::size_t>(nchunks), 0.0);
    std::vector<double> sqs(static_cast<std::size_t>(nchunks), 0.0);

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::int64_t ci = 0; ci < nchunks; ++ci) {
        const long start = static_cast<long>(ci) * static_cast<long>(kProfileChunk);
        const long stop = std::min(trials, start + static_cast<long>(kProfileChunk));
        double s = 0, s2 = 0;
        for (long t = start; t < stop; ++t) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
            double x = f(rng);
            s += x;
            s2 += x * x;
        }
        sums[static_cast<std::size_t>(ci)] = s;
        sqs[static_cast<std::size_t>(ci)] = s2;
    }

    double s = 0, s2 = 0;
    for (std::int64_t ci = 0; ci < nchunks; ++ci) {
        s += sums[static_cast<std::size_t>(ci)];
        s2 += sqs[static_cast<std::size_t>(ci)];
    }
    MeanStderr out;
    out.trials = trials;
    out.mean = s / static_cast<double>(trials);
    double var = (s2 - s * out.mean) / static_cast<double>(trials - 1);
    if (var < 0) var = 0;
    out.se = std::sqrt(var / static_cast<double>(trials));
    return out;
}

}  // namespace qmech
