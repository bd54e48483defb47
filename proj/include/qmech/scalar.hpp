#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace qmech {

// Exact backend for discrete distributions with rational data.  The float
// backend is plain double; everything templated on a scalar T accepts either.
using Rat = boost::multiprecision::cpp_rational;

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static double tolerance() { return 1e-9; }
    static double to_double(double x) { return x; }
    static double from_int(long v) { return static_cast<double>(v); }
};

template <>
struct scalar_traits<Rat> {
    static constexpr bool exact = true;
    static Rat tolerance() { return Rat(0); }
    static double to_double(const Rat& x) { return x.convert_to<double>(); }
    static Rat from_int(long v) { return Rat(v); }
};

template <class T>
double to_double(const T& x) {
    return scalar_traits<T>::to_double(x);
}

// Quantile queries at q=0 legitimately answer "+infinity"; the sentinel is
// propagated through this struct and never used as a price.
template <class T>
struct QuantileAnswer {
    T value{};
    bool infinite = false;
};

template <class T>
T pow_int(T base, long e) {
    if (e < 0) {
        if (base == T(0)) throw std::domain_error("pow_int: zero base, negative exponent");
        return T(1) / pow_int(base, -e);
    }
    T r(1);
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

// Smallest k >= 0 with ratio^k >= target, i.e. ceil(log_ratio(target)) for
// target >= 1.  Computed by repeated multiplication so the exact backend hits
// integer-power boundaries precisely.
template <class T>
long ceil_log_ratio(const T& ratio, const T& target) {
    if (!(ratio > T(1))) throw std::domain_error("ceil_log_ratio: ratio must exceed 1");
    long k = 0;
    T p(1);
    while (p < target) {
        p *= ratio;
        ++k;
        if (k > 100000) throw std::domain_error("ceil_log_ratio: exponent out of range");
    }
    return k;
}

// Smallest k with ratio^(k/m) >= target, i.e. ratio^k >= target^m.  Lets the
// exact backend handle per-item grid ratios of the form (1+x)^(1/m) without
// ever materializing the irrational root.
template <class T>
long ceil_log_ratio_root(const T& ratio, const T& target, int m) {
    return ceil_log_ratio(ratio, pow_int(target, m));
}

inline long floor_reciprocal(double eps1) {
    if (!(eps1 > 0)) throw std::domain_error("floor_reciprocal: eps1 must be positive");
    // nudge past representation error so decimal inputs like 0.2 floor to 5
    return static_cast<long>(std::floor(1.0 / eps1 + 1e-9));
}

inline long floor_reciprocal(const Rat& eps1) {
    if (!(eps1 > 0)) throw std::domain_error("floor_reciprocal: eps1 must be positive");
    Rat inv = Rat(1) / eps1;
    boost::multiprecision::cpp_int q =
        boost::multiprecision::numerator(inv) / boost::multiprecision::denominator(inv);
    return q.convert_to<long>();
}

namespace detail {

// Largest r with r^m <= x, for nonnegative integer x.
inline boost::multiprecision::cpp_int integer_root_floor(const boost::multiprecision::cpp_int& x,
                                                         int m) {
    using boost::multiprecision::cpp_int;
    if (x <= 1) return x;
    cpp_int lo = 1;
    cpp_int hi = 1;
    while (boost::multiprecision::pow(hi, static_cast<unsigned>(m)) <= x) hi <<= 1;
    while (lo + 1 < hi) {
        cpp_int mid = (lo + hi) / 2;
        if (boost::multiprecision::pow(mid, static_cast<unsigned>(m)) <= x)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace detail

// x^(1/m) when it is rational, otherwise nullopt.  Requires x > 0, m >= 1.
inline std::optional<Rat> exact_root(const Rat& x, int m) {
    if (!(x > 0)) throw std::domain_error("exact_root: base must be positive");
    if (m < 1) throw std::domain_error("exact_root: order must be >= 1");
    if (m == 1) return x;
    using boost::multiprecision::cpp_int;
    cpp_int num = boost::multiprecision::numerator(x);
    cpp_int den = boost::multiprecision::denominator(x);
    cpp_int rn = detail::integer_root_floor(num, m);
    if (boost::multiprecision::pow(rn, static_cast<unsigned>(m)) != num) return std::nullopt;
    cpp_int rd = detail::integer_root_floor(den, m);
    if (boost::multiprecision::pow(rd, static_cast<unsigned>(m)) != den) return std::nullopt;
    return Rat(rn, rd);
}

// Parses "3", "-1/2", "0.125", "2.5e-3" into an exact rational.
Rat parse_rational(const std::string& s);
std::string format_rational(const Rat& x);

template <class T>
T parse_scalar(const std::string& s);

template <>
inline double parse_scalar<double>(const std::string& s) {
    std::size_t pos = 0;
    if (auto slash = s.find('/'); slash != std::string::npos) {
        double num = std::stod(s.substr(0, slash));
        double den = std::stod(s.substr(slash + 1));
        return num / den;
    }
    double v = std::stod(s, &pos);
    return v;
}

template <>
inline Rat parse_scalar<Rat>(const std::string& s) {
    return parse_rational(s);
}

}  // namespace qmech
