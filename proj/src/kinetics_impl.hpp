#pragma once

#include <cmath>
#include <limits>

#include "dlss/kinetics.hpp"
#include "dual.hpp"

namespace dlss::detail {

// sqrt(a b), split into sqrt(a) sqrt(b) only where the product leaves the normal range
// (sqrt(x) * sqrt(x) != x in general, which would break exact zero flux on constant states).
inline double geometric_mean(double a, double b) {
    const double ab = a * b;
    return std::isnormal(ab) || ab == 0.0 ? std::sqrt(ab) : std::sqrt(a) * std::sqrt(b);
}

// L_a(x, y) = (x^a - y^a) / (a (x - y)) for x, y > 0 and x != y.
// x^a - y^a is formed as M^a * (-expm1(a log(m/M))) to avoid cancellation.
template <class T>
T power_quotient(T x, T y, double a, double eps) {
    const bool x_big = value(x) >= value(y);
    const T big = x_big ? x : y;
    const T small = x_big ? y : x;
    const double gap = value(big) - value(small);
    if (gap <= eps * value(big)) {
        const T mid = 0.5 * (x + y);
        const T h = (big - small) / (2.0 * mid);
        return pow(mid, a - 1.0) * (1.0 + (a - 1.0) * (a - 2.0) * h * h / 6.0);
    }
    const T lr = log(small / big);
    if (std::abs(a) < 1e-12) return -lr / (big - small);
    return pow(big, a) * (-expm1(a * lr)) / (a * (big - small));
}

inline double jbar_degree(const ActivitySpec& spec) {
    switch (spec.family) {
        case ActivityFamily::StolarskyPower:
        case ActivityFamily::RootDifference: return spec.alpha;
        case ActivityFamily::Mrss: return 1.0;
        case ActivityFamily::MassAction:
        case ActivityFamily::Constant: return 2.0;
    }
    return 0.0;
}

template <class T>
T jbar_unscaled(const ActivitySpec& spec, T x, T y) {
    const double a = spec.alpha;
    switch (spec.family) {
        case ActivityFamily::StolarskyPower: {
            const T l = power_quotient(x, y, a, spec.epsilon_diag);
            return 2.0 * l * l * (x - y) * (x + y) / (pow(x, a) + pow(y, a));
        }
        case ActivityFamily::RootDifference: {
            const T l = power_quotient(x, y, 0.5 * a, spec.epsilon_diag);
            return l * l * (x - y) * (x + y);
        }
        case ActivityFamily::Mrss:
            return 2.0 * (x - y);
        case ActivityFamily::MassAction:
            return (x - y) * (x + y);
        case ActivityFamily::Constant:
            return spec.constant * (x - y) * (x + y);
    }
    return T(std::numeric_limits<double>::quiet_NaN());
}

// jbar on positive arguments, evaluated on the pair scaled by max(x, y) and rescaled by
// homogeneity; the unscaled formulas overflow for arguments near the bottom of the double range.
template <class T>
T jbar_positive(const ActivitySpec& spec, T x, T y) {
    const T big = value(x) >= value(y) ? x : y;
    return pow(big, jbar_degree(spec)) * jbar_unscaled(spec, x / big, y / big);
}

}  // namespace dlss::detail
