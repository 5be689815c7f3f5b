#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace minent {

/// Closed real interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double a, double b) : lo(a), hi(b) {
        if (!(a <= b)) throw std::invalid_argument("Interval: lo must not exceed hi");
    }

    double length() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }

    bool contains(double t, double pad = 0.0) const { return t >= lo - pad && t <= hi + pad; }

    Interval clipped_to(const Interval& other) const {
        return Interval(std::max(lo, other.lo), std::min(hi, other.hi));
    }
};

/// Which one-sided limit to take at a point where a piecewise map may jump.
enum class Side { Left, Right };

} // namespace minent
