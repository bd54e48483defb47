#pragma once

#include <cstdint>
#include <random>

namespace qmech {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stable stream derivation: child streams depend only on (seed, tags), never
// on call order, so parallel and serial runs draw identical randomness.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(seed ^ splitmix64(a)) ^ splitmix64(~b));
}

// mt19937_64 output is pinned down by the standard, and uniform01 below uses
// raw bits, so results are reproducible across platforms and libstdc++
// versions (std::uniform_real_distribution is not).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    double uniform01() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    std::uint64_t below(std::uint64_t n) {  // uniform in [0, n)
        if (n == 0) return 0;
        std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    long uniform_int(long lo, long hi) {  // inclusive range
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace qmech
