#pragma once

#include <functional>

namespace dlss {

using ScalarFunction = std::function<double(double)>;

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

/**
 * Composite Simpson on 2^k panels with one Richardson extrapolation per level, refined until
 * successive extrapolants agree to tol * max(1, |value|). A non-finite sample makes the result
 * that value (an infinite integrand is a legitimate answer for the dissipation functionals).
 * Throws Quadrature when max_level is reached first.
 */
QuadratureResult simpson_richardson(const ScalarFunction& f, double a, double b, double tol = 1e-10,
                                    int max_level = 22);

/// (1/(b-a)) * integral of f over [a, b], adaptive Gauss-Kronrod (31 points) checked against 15 points.
double cell_average(const ScalarFunction& f, double a, double b, double tol = 1e-12);

}  // namespace dlss
