#pragma once

#include <span>
#include <vector>

#include "dlss/kinetics.hpp"
#include "dlss/torus.hpp"

namespace dlss {

/// E_N(c) = (1/N) sum (c_k log c_k - c_k + 1), with 0 log 0 = 0.
double entropy(const GridState& c);
/// Pointwise entropy density x log x - x + 1.
double entropy_density(double x);

double cosh_star(double r);             // 4 (cosh(r/2) - 1)
double cosh_star_derivative(double r);  // 2 sinh(r/2)
double cosh_primal(double s);           // Legendre dual of cosh_star
double cosh_primal_derivative(double s);  // 2 asinh(s/2)

/// w C(s/w) for w > 0; 0 at (0, 0); +infinity for s != 0, w = 0.
double perspective(double s, double w);

/// R(c, J) = (1/N) sum perspective(N^2 J_k | N^4 m_k).
double primal_dissipation(const ActivitySpec& spec, const GridState& c, std::span<const double> j);
/// R*(c, xi) = (1/N) sum N^4 m_k cosh_star(xi_k / N^2).
double dual_dissipation(const ActivitySpec& spec, const GridState& c, std::span<const double> xi);
/// S(c) = (1/N) sum 2 N^4 sigma_k (c_k - sqrt(c_{k-1} c_{k+1}))^2 through the jbar extension.
double slope(const ActivitySpec& spec, const GridState& c);

/// -laplacian(log c); requires a strictly positive state.
GridFunction driving_force(const GridState& c);
/// J_k = N^2 m_k cosh_star'(xi_k / N^2), the flux conjugate to xi.
FluxField constitutive_flux(const ActivitySpec& spec, const GridState& c, std::span<const double> xi);

struct DiagnosticsRecord {
    double t = 0.0;
    double energy = 0.0;
    double primal = 0.0;
    double slope = 0.0;
    double mass = 0.0;
    double min_density = 0.0;
    double cum_dissipation = 0.0;
    double edb_residual = 0.0;
};

DiagnosticsRecord evaluate_diagnostics(const ActivitySpec& spec, double t, const GridState& c,
                                       std::span<const double> j);

/**
 * Running time integral of R + S over quadrature nodes. Trapezoidal; an interval whose left
 * value is infinite (zero cells in the initial state make R infinite there) falls back to its
 * right-endpoint value.
 */
class DissipationIntegral {
public:
    void add(double dt, double left, double right);
    double value() const noexcept { return value_; }
    bool used_right_endpoint() const noexcept { return right_endpoint_used_; }

private:
    double value_ = 0.0;
    bool right_endpoint_used_ = false;
};

}  // namespace dlss
