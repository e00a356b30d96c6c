#include "dlss/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dlss/error.hpp"

namespace dlss {

QuadratureResult simpson_richardson(const ScalarFunction& f, double a, double b, double tol, int max_level) {
    if (!(b > a)) fail(ErrorCode::InvalidArgument, "simpson_richardson: need a < b");
    QuadratureResult out;
    const double width = b - a;
    const double fa = f(a);
    const double fb = f(b);
    out.evaluations = 2;
    if (!std::isfinite(fa) || !std::isfinite(fb)) {
        out.value = std::isnan(fa) || std::isnan(fb) ? fa + fb : std::abs(fa) + std::abs(fb);
        return out;
    }
    // trapezoid sums T_n reuse all previous nodes; S_2n = (4 T_2n - T_n) / 3, R = (16 S_2n - S_n) / 15
    double trap = 0.5 * width * (fa + fb);
    double simpson_prev = 0.0;
    double richardson_prev = 0.0;
    long panels = 1;
    for (int level = 1; level <= max_level; ++level) {
        const double h = width / static_cast<double>(2 * panels);
        double mid = 0.0;
        for (long i = 0; i < panels; ++i) {
            const double v = f(a + static_cast<double>(2 * i + 1) * h);
            if (!std::isfinite(v)) {
                out.value = std::isnan(v) ? v : std::abs(v);
                out.evaluations += i + 1;
                return out;
            }
            mid += v;
        }
        out.evaluations += panels;
        const double trap_next = 0.5 * trap + h * mid;
        const double simpson = (4.0 * trap_next - trap) / 3.0;
        trap = trap_next;
        panels *= 2;
        if (level >= 2) {
            const double richardson = (16.0 * simpson - simpson_prev) / 15.0;
            if (level >= 4) {
                const double diff = std::abs(richardson - richardson_prev);
                if (diff <= tol * std::max(1.0, std::abs(richardson))) {
                    out.value = richardson;
                    out.error_estimate = diff;
                    return out;
                }
            }
            richardson_prev = richardson;
        }
        simpson_prev = simpson;
    }
    fail(ErrorCode::Quadrature, "simpson_richardson: no convergence to " + std::to_string(tol) + " after " +
                                    std::to_string(max_level) + " levels");
}

double cell_average(const ScalarFunction& f, double a, double b, double tol) {
    if (!(b > a)) fail(ErrorCode::InvalidArgument, "cell_average: need a < b");
    using boost::math::quadrature::gauss_kronrod;
    // Boost's own error estimate is QUADPACK-style and pessimistic on tiny cells, so the 31-point
    // result is checked against an independent 15-point one instead. Single panels first; the
    // adaptive rules only run when those disagree.
    const double width = b - a;
    const double limit = std::max(1e3 * tol, 1e-10);
    double avg = gauss_kronrod<double, 31>::integrate(f, a, b, 0) / width;
    double coarse = gauss_kronrod<double, 15>::integrate(f, a, b, 0) / width;
    if (!(std::abs(avg - coarse) <= 0.1 * limit * std::max(1.0, std::abs(avg)))) {
        avg = gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol) / width;
        coarse = gauss_kronrod<double, 15>::integrate(f, a, b, 15, tol) / width;
    }
    if (!std::isfinite(avg)) fail(ErrorCode::Quadrature, "cell_average: non-finite integral");
    const double diff = std::abs(avg - coarse);
    if (diff > limit * std::max(1.0, std::abs(avg)))
        fail(ErrorCode::Quadrature, "cell_average: 15- and 31-point rules differ by " + std::to_string(diff));
    return avg;
}

}  // namespace dlss
