#pragma once

#include <algorithm>
#include <ostream>

namespace robust {

/// Closed interval [lo, hi]; `open` marks a set whose endpoints are excluded.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool open = false;

    bool empty() const { return open ? !(lo < hi) : !(lo <= hi); }
    double width() const { return hi - lo; }

    bool contains(double x, double slack = 0.0) const {
        if (open) return x > lo - slack && x < hi + slack;
        return x >= lo - slack && x <= hi + slack;
    }

    /// Subset test on closed endpoints.
    bool within(const Interval& outer, double slack = 0.0) const {
        return lo >= outer.lo - slack && hi <= outer.hi + slack;
    }

    bool intersects(const Interval& other) const {
        const double l = std::max(lo, other.lo);
        const double h = std::min(hi, other.hi);
        if (open || other.open) return l < h;
        return l <= h;
    }

    friend bool operator==(const Interval&, const Interval&) = default;

    friend std::ostream& operator<<(std::ostream& os, const Interval& iv) {
        return os << (iv.open ? "(" : "[") << iv.lo << ", " << iv.hi << (iv.open ? ")" : "]");
    }
};

} // namespace robust
