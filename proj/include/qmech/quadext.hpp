#pragma once

#include "qmech/scalar.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace qmech {

// Exact arithmetic over Q(sqrt(d)) for a compile-time positive rational
// d = N/DEN that is not a perfect square.  Extends the exact backend to
// mechanisms whose grid ratio is the square root of a rational, e.g.
// delta = sqrt(1+eps) - 1, with no rounding anywhere.
template <long N, long DEN = 1>
class QuadExt {
    static_assert(N > 0 && DEN > 0, "QuadExt: d must be positive");

  public:
    Rat a{0};  // rational part
    Rat b{0};  // coefficient of sqrt(d)

    static const Rat& d() {
        static const Rat v = Rat(N) / Rat(DEN);
        return v;
    }

    QuadExt() = default;
    explicit QuadExt(int v) : a(v) {}
    explicit QuadExt(long v) : a(v) {}
    explicit QuadExt(double v) : a(v) {}  // doubles are dyadic rationals
    explicit QuadExt(Rat v) : a(std::move(v)) {}
    QuadExt(Rat ra, Rat rb) : a(std::move(ra)), b(std::move(rb)) {}

    static QuadExt sqrt_d() { return QuadExt(Rat(0), Rat(1)); }

    // base^(1/root) when it lies in this field: rational roots pass through
    // unchanged, and square roots of d times a rational square pick up one
    // factor of sqrt(d).
    static std::optional<QuadExt> grid_root(const Rat& base, int root) {
        if (auto r = exact_root(base, root)) return QuadExt(*r);
        if (root == 2) {
            if (auto r2 = exact_root(Rat(base / d()), 2)) return QuadExt(Rat(0), *r2);
        }
        return std::nullopt;
    }

    // sign of a + b*sqrt(d); with mixed signs the larger of a^2 and b^2*d
    // decides, and equality there means the two terms cancel exactly.
    int sign() const {
        const int sa = a == 0 ? 0 : (a > 0 ? 1 : -1);
        const int sb = b == 0 ? 0 : (b > 0 ? 1 : -1);
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        const Rat lhs = a * a;
        const Rat rhs = b * b * d();
        if (lhs == rhs) return 0;
        return lhs > rhs ? sa : sb;
    }

    friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
        return QuadExt(Rat(x.a + y.a), Rat(x.b + y.b));
    }
    friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
        return QuadExt(Rat(x.a - y.a), Rat(x.b - y.b));
    }
    friend QuadExt operator-(const QuadExt& x) { return QuadExt(Rat(-x.a), Rat(-x.b)); }
    friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
        return QuadExt(Rat(x.a * y.a + x.b * y.b * d()), Rat(x.a * y.b + x.b * y.a));
    }
    friend QuadExt operator/(const QuadExt& x, const QuadExt& y) {
        const Rat den = y.a * y.a - y.b * y.b * d();
        if (den == 0) throw std::domain_error("QuadExt: division by zero");
        const QuadExt num = x * QuadExt(Rat(y.a), Rat(-y.b));
        return QuadExt(Rat(num.a / den), Rat(num.b / den));
    }

    QuadExt& operator+=(const QuadExt& y) { return *this = *this + y; }
    QuadExt& operator-=(const QuadExt& y) { return *this = *this - y; }
    QuadExt& operator*=(const QuadExt& y) { return *this = *this * y; }
    QuadExt& operator/=(const QuadExt& y) { return *this = *this / y; }

    friend bool operator==(const QuadExt& x, const QuadExt& y) {
        return x.a == y.a && x.b == y.b;
    }
    friend bool operator!=(const QuadExt& x, const QuadExt& y) { return !(x == y); }
    friend bool operator<(const QuadExt& x, const QuadExt& y) { return (x - y).sign() < 0; }
    friend bool operator>(const QuadExt& x, const QuadExt& y) { return (x - y).sign() > 0; }
    friend bool operator<=(const QuadExt& x, const QuadExt& y) { return (x - y).sign() <= 0; }
    friend bool operator>=(const QuadExt& x, const QuadExt& y) { return (x - y).sign() >= 0; }
};

template <long N, long DEN>
struct scalar_traits<QuadExt<N, DEN>> {
    static constexpr bool exact = true;
    static QuadExt<N, DEN> tolerance() { return QuadExt<N, DEN>(0); }
    static double to_double(const QuadExt<N, DEN>& x) {
        return scalar_traits<Rat>::to_double(x.a) +
               scalar_traits<Rat>::to_double(x.b) *
                   std::sqrt(scalar_traits<Rat>::to_double(QuadExt<N, DEN>::d()));
    }
    static QuadExt<N, DEN> from_int(long v) { return QuadExt<N, DEN>(v); }
};

}  // namespace qmech
