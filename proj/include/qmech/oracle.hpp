#pragma once

#include "qmech/continuous.hpp"
#include "qmech/pmf.hpp"
#include "qmech/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qmech {

// Oracle sources expose value queries q(v) = Pr[X >= v] and quantile queries
// v(q) = largest z with Pr[X >= z] >= q.  Discretization routines are written
// against this duck-typed interface and count queries through CountingOracle.

template <class T>
struct PmfSource {
    const DiscretePmf<T>* d;
    using scalar = T;
    T value_query(const T& v) const { return d->ccdf(v); }
    QuantileAnswer<T> quantile_query(const T& q) const { return d->quantile(q); }
};

struct ContSource {
    const ContinuousDist* d;
    using scalar = double;
    double value_query(double v) const { return ccdf(*d, v); }
    QuantileAnswer<double> quantile_query(double q) const { return quantile(*d, q); }
};

// Quantile oracle backed by t i.i.d. samples: v(q) = ceil(t*q)-th largest.
class EmpiricalSource {
  public:
    using scalar = double;
    explicit EmpiricalSource(std::vector<double> samples) : desc_(std::move(samples)) {
        if (desc_.empty()) throw std::domain_error("EmpiricalSource: no samples");
        std::sort(desc_.begin(), desc_.end(), std::greater<>());
    }
    double value_query(double v) const {
        auto cnt = std::count_if(desc_.begin(), desc_.end(), [&](double x) { return x >= v; });
        return static_cast<double>(cnt) / static_cast<double>(desc_.size());
    }
    QuantileAnswer<double> quantile_query(double q) const {
        if (q <= 0) return {std::numeric_limits<double>::infinity(), true};
        auto t = static_cast<double>(desc_.size());
        auto r = static_cast<std::size_t>(std::ceil(t * q));
        r = std::clamp<std::size_t>(r, 1, desc_.size());
        return {desc_[r - 1], false};
    }
    std::size_t sample_count() const { return desc_.size(); }

  private:
    std::vector<double> desc_;  // descending
};

template <class Src>
class CountingOracle {
  public:
    using scalar = typename Src::scalar;
    explicit CountingOracle(Src src) : src_(std::move(src)) {}

    scalar value_query(const scalar& v) {
        ++value_queries_;
        return src_.value_query(v);
    }
    QuantileAnswer<scalar> quantile_query(const scalar& q) {
        ++quantile_queries_;
        return src_.quantile_query(q);
    }
    std::int64_t value_queries() const { return value_queries_; }
    std::int64_t quantile_queries() const { return quantile_queries_; }

  private:
    Src src_;
    std::int64_t value_queries_ = 0;
    std::int64_t quantile_queries_ = 0;
};

// Records the query arguments (for non-adaptiveness checks) while forwarding
// to a real source.
template <class Src>
class RecordingOracle {
  public:
    using scalar = typename Src::scalar;
    explicit RecordingOracle(Src src) : src_(std::move(src)) {}

    scalar value_query(const scalar& v) {
        value_log_.push_back(v);
        return src_.value_query(v);
    }
    QuantileAnswer<scalar> quantile_query(const scalar& q) {
        quantile_log_.push_back(q);
        return src_.quantile_query(q);
    }
    const std::vector<scalar>& value_log() const { return value_log_; }
    const std::vector<scalar>& quantile_log() const { return quantile_log_; }

  private:
    Src src_;
    std::vector<scalar> value_log_;
    std::vector<scalar> quantile_log_;
};

// Answers nothing real; used to prove the query plan does not depend on
// oracle answers.  ccdf 1 everywhere and a constant quantile answer keep any
// discretizer's bookkeeping valid.
template <class T>
class StubOracle {
  public:
    using scalar = T;
    T value_query(const T& v) {
        value_log_.push_back(v);
        return T(1);
    }
    QuantileAnswer<T> quantile_query(const T& q) {
        quantile_log_.push_back(q);
        return {T(1), false};
    }
    const std::vector<T>& value_log() const { return value_log_; }
    const std::vector<T>& quantile_log() const { return quantile_log_; }

  private:
    std::vector<T> value_log_;
    std::vector<T> quantile_log_;
};

}  // namespace qmech
