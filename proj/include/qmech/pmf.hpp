#pragma once

#include "qmech/rng.hpp"
#include "qmech/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qmech {

// Finite distribution with strictly ascending support and positive atom
// masses.  Construction merges duplicate values, prunes zero atoms and
// validates normalization (exactly for the rational backend, within the float
// tolerance otherwise).
template <class T>
class DiscretePmf {
  public:
    DiscretePmf() = default;

    static DiscretePmf from_atoms(std::vector<std::pair<T, T>> atoms,
                                  bool require_normalized = true) {
        std::sort(atoms.begin(), atoms.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        DiscretePmf d;
        for (auto& [v, m] : atoms) {
            if (m < T(0)) {
                if constexpr (scalar_traits<T>::exact) {
                    throw std::domain_error("DiscretePmf: negative atom mass");
                } else {
                    if (m < -scalar_traits<T>::tolerance())
                        throw std::domain_error("DiscretePmf: negative atom mass");
                    m = T(0);
                }
            }
            if (m == T(0)) continue;
            if (!d.vals_.empty() && d.vals_.back() == v) {
                d.mass_.back() += m;
            } else {
                d.vals_.push_back(std::move(v));
                d.mass_.push_back(std::move(m));
            }
        }
        if (d.vals_.empty()) throw std::domain_error("DiscretePmf: no positive atoms");
        T tot(0);
        for (const auto& m : d.mass_) tot += m;
        if (require_normalized) {
            T err = tot - T(1);
            if (err < T(0)) err = -err;
            if (err > scalar_traits<T>::tolerance())
                throw std::domain_error("DiscretePmf: atom masses do not sum to 1");
        }
        d.total_ = tot;
        d.rebuild_cache();
        return d;
    }

    static DiscretePmf point_mass(const T& v) { return from_atoms({{v, T(1)}}); }

    std::size_t size() const { return vals_.size(); }
    const T& value(std::size_t l) const { return vals_[l]; }
    const T& mass(std::size_t l) const { return mass_[l]; }
    const std::vector<T>& values() const { return vals_; }
    const std::vector<T>& masses() const { return mass_; }
    const T& min_value() const { return vals_.front(); }
    const T& max_value() const { return vals_.back(); }
    const T& total() const { return total_; }

    // Pr[X >= v] at support point index l.
    const T& ccdf_at(std::size_t l) const { return ctop_[l]; }

    T ccdf(const T& v) const {
        // first support point >= v
        auto it = std::lower_bound(vals_.begin(), vals_.end(), v);
        if (it == vals_.end()) return T(0);
        return ctop_[static_cast<std::size_t>(it - vals_.begin())];
    }

    T ccdf_above(const T& v) const {  // Pr[X > v]
        auto it = std::upper_bound(vals_.begin(), vals_.end(), v);
        if (it == vals_.end()) return T(0);
        return ctop_[static_cast<std::size_t>(it - vals_.begin())];
    }

    T mass_at(const T& v) const {
        auto it = std::lower_bound(vals_.begin(), vals_.end(), v);
        if (it == vals_.end() || *it != v) return T(0);
        return mass_[static_cast<std::size_t>(it - vals_.begin())];
    }

    // Largest support index with value <= v (bid projection).
    std::optional<std::size_t> index_at_or_below(const T& v) const {
        auto it = std::upper_bound(vals_.begin(), vals_.end(), v);
        if (it == vals_.begin()) return std::nullopt;
        return static_cast<std::size_t>(it - vals_.begin()) - 1;
    }

    // Largest z with Pr[X >= z] >= q; +infinity when q == 0.
    QuantileAnswer<T> quantile(T q) const {
        if (q > total_ && q - total_ <= scalar_traits<T>::tolerance()) q = total_;
        if (q < T(0) || q > total_) throw std::domain_error("quantile: q outside [0,1]");
        if (q == T(0)) return {T(0), true};
        // ctop_ is strictly decreasing; find the largest l with ctop_[l] >= q.
        std::size_t lo = 0, hi = vals_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi + 1) / 2;
            if (ctop_[mid] >= q)
                lo = mid;
            else
                hi = mid - 1;
        }
        return {vals_[lo], false};
    }

    T mean() const {
        T s(0);
        for (std::size_t l = 0; l < vals_.size(); ++l) s += vals_[l] * mass_[l];
        return s;
    }

    std::size_t sample_index(Rng& rng) const {
        double u = rng.uniform01();
        auto it = std::upper_bound(cdf_d_.begin(), cdf_d_.end(), u);
        std::size_t l = static_cast<std::size_t>(it - cdf_d_.begin());
        return std::min(l, vals_.size() - 1);
    }

    const T& sample(Rng& rng) const { return vals_[sample_index(rng)]; }

    template <class U>
    DiscretePmf<U> cast() const {
        std::vector<std::pair<U, U>> atoms;
        atoms.reserve(vals_.size());
        for (std::size_t l = 0; l < vals_.size(); ++l)
            atoms.emplace_back(static_cast<U>(to_double(vals_[l])),
                               static_cast<U>(to_double(mass_[l])));
        return DiscretePmf<U>::from_atoms(std::move(atoms), false);
    }

  private:
    void rebuild_cache() {
        ctop_.assign(vals_.size(), T(0));
        T acc(0);
        for (std::size_t l = vals_.size(); l-- > 0;) {
            acc += mass_[l];
            ctop_[l] = acc;
        }
        cdf_d_.assign(vals_.size(), 0.0);
        double cum = 0;
        for (std::size_t l = 0; l < vals_.size(); ++l) {
            cum += to_double(mass_[l]);
            cdf_d_[l] = cum;
        }
    }

    std::vector<T> vals_;
    std::vector<T> mass_;
    std::vector<T> ctop_;        // ctop_[l] = Pr[X >= vals_[l]]
    std::vector<double> cdf_d_;  // cumulative in double, for sampling
    T total_{};
};

// First-order stochastic dominance: Pr_a[X >= v] >= Pr_b[X >= v] for every v.
// Step ccdfs only change at support points, so the union of supports decides.
template <class T>
bool dominates(const DiscretePmf<T>& a, const DiscretePmf<T>& b) {
    const T tol = scalar_traits<T>::tolerance();
    for (const auto& v : a.values())
        if (a.ccdf(v) + tol < b.ccdf(v)) return false;
    for (const auto& v : b.values())
        if (a.ccdf(v) + tol < b.ccdf(v)) return false;
    return true;
}

}  // namespace qmech
