#pragma once

#include <cmath>

namespace dlss::detail {

// Forward-mode dual number carrying one directional derivative.
struct Dual {
    double v = 0.0;
    double d = 0.0;
    Dual() = default;
    Dual(double value, double deriv = 0.0) : v(value), d(deriv) {}
};

inline double value(double x) { return x; }
inline double value(const Dual& x) { return x.v; }

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) {
    const double q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
}
inline Dual operator+(Dual a, double b) { return {a.v + b, a.d}; }
inline Dual operator+(double a, Dual b) { return {a + b.v, b.d}; }
inline Dual operator-(Dual a, double b) { return {a.v - b, a.d}; }
inline Dual operator-(double a, Dual b) { return {a - b.v, -b.d}; }
inline Dual operator*(Dual a, double b) { return {a.v * b, a.d * b}; }
inline Dual operator*(double a, Dual b) { return {a * b.v, a * b.d}; }
inline Dual operator/(Dual a, double b) { return {a.v / b, a.d / b}; }
inline Dual operator/(double a, Dual b) {
    const double q = a / b.v;
    return {q, -q * b.d / b.v};
}

inline Dual log(Dual a) { return {std::log(a.v), a.d / a.v}; }
inline Dual exp(Dual a) {
    const double e = std::exp(a.v);
    return {e, e * a.d};
}
inline Dual expm1(Dual a) { return {std::expm1(a.v), std::exp(a.v) * a.d}; }
inline Dual sqrt(Dual a) {
    const double s = std::sqrt(a.v);
    return {s, a.d / (2.0 * s)};
}
inline Dual pow(Dual a, double p) {
    const double v = std::pow(a.v, p);
    if (a.d == 0.0) return {v, 0.0};
    return {v, p * (v / a.v) * a.d};
}

using std::exp;
using std::expm1;
using std::log;
using std::pow;
using std::sqrt;

}  // namespace dlss::detail
