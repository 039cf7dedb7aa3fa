#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace cycleguard {

/// Closed double interval with outward padding after every operation.
/// Not a full IEEE-directed-rounding implementation; the one-ulp padding
/// over-covers rounding error for the polynomial ranges used here.
struct DInterval {
    double lo = 0.0, hi = 0.0;

    DInterval() = default;
    explicit DInterval(double v) : lo(v), hi(v) {}
    DInterval(double l, double h) : lo(l), hi(h) {}

    static DInterval widened(double l, double h) {
        return {std::nextafter(l, -std::numeric_limits<double>::infinity()),
                std::nextafter(h, std::numeric_limits<double>::infinity())};
    }

    bool contains_zero() const { return lo <= 0.0 && hi >= 0.0; }
};

inline DInterval operator+(DInterval a, DInterval b) {
    return DInterval::widened(a.lo + b.lo, a.hi + b.hi);
}

inline DInterval operator-(DInterval a, DInterval b) {
    return DInterval::widened(a.lo - b.hi, a.hi - b.lo);
}

inline DInterval operator*(DInterval a, DInterval b) {
    double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return DInterval::widened(std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4}));
}

inline DInterval abs(DInterval a) {
    if (a.lo >= 0.0) return a;
    if (a.hi <= 0.0) return {-a.hi, -a.lo};
    return {0.0, std::max(-a.lo, a.hi)};
}

} // namespace cycleguard
