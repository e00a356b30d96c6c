#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dlss/kinetics.hpp"
#include "dlss/quadrature.hpp"
#include "dlss/torus.hpp"
#include "dlss/trajectory.hpp"

namespace dlss {

/// rho^N(x) = c_k on [k/N, (k+1)/N), x read modulo 1.
class PiecewiseConstantDensity {
public:
    explicit PiecewiseConstantDensity(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<double>& values() const noexcept { return values_; }
    double operator()(double x) const;
    double integral() const;
    double lp_norm(double p) const;  // exact, cell by cell

private:
    std::vector<double> values_;
};

PiecewiseConstantDensity embed_density(std::span<const double> c);

/// (iota*_N phi)_k = N * integral of phi over [k/N, (k+1)/N).
GridFunction embed_dual(const ScalarFunction& phi, std::size_t n, double tol = 1e-12);

/**
 * I_N J = Delta^{-1} iota_N laplacian(J): the periodic, mean-zero, piecewise quadratic function
 * whose second derivative is (laplacian J)_k on cell k. The mean of J lies in the kernel of the
 * discrete Laplacian and is dropped; it is kept in dropped_mean() for the record.
 */
class FluxEmbedding {
public:
    explicit FluxEmbedding(std::span<const double> j);

    std::size_t size() const noexcept { return curvature_.size(); }
    double operator()(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;
    double l1_norm() const;  // exact integral of |I_N J| over the torus
    double dropped_mean() const noexcept { return dropped_mean_; }

private:
    std::size_t cell(double x, double& offset) const;
    std::vector<double> value_;      // at x_k = k/N
    std::vector<double> slope_;      // at x_k
    std::vector<double> curvature_;  // on [x_k, x_{k+1})
    double dropped_mean_ = 0.0;
};

FluxEmbedding embed_flux(std::span<const double> j);

/// Periodic density on [0, 1) with its first two derivatives. A nonzero panel count marks a
/// piecewise smooth function with breaks at panel_offset + k / panels; integrals then go panel by panel.
struct SmoothDensity {
    ScalarFunction value;
    ScalarFunction d1;
    ScalarFunction d2;
    std::size_t panels = 0;
    double panel_offset = 0.0;
};

/// mean + amplitude * sin(2 pi mode x).
SmoothDensity sine_density(double mean, double amplitude, int mode = 1);

/// Periodic cubic spline through (x_k, c_k) with x_k = (k + 1/2)/N. Used to feed solver output to
/// the relaxed slope, which needs two derivatives.
SmoothDensity spline_interpolant(std::span<const double> c);

double continuous_entropy(const ScalarFunction& rho, double tol = 1e-10);
/// Exact for piecewise constant densities; agrees with entropy(c) bit for bit.
double continuous_entropy(const PiecewiseConstantDensity& rho);
/// (1/2) integral j^2 / rho^alpha; +infinity where rho = 0 and j != 0.
double continuous_primal(const ScalarFunction& rho, const ScalarFunction& j, double alpha, double tol = 1e-10);
/// (1/2) integral rho^alpha eta^2.
double continuous_dual(const ScalarFunction& rho, const ScalarFunction& eta, double alpha, double tol = 1e-10);

/// Primal dissipation of (iota_N c, I_N J + mean(J)), exact cell by cell.
double embedded_primal(std::span<const double> c, std::span<const double> j, double alpha);

/// max_k |(iota*_N xi'')_k - (laplacian iota*_N xi)_k|, to compare with ||xi'''||_inf / (3N).
double commutator_defect(const ScalarFunction& xi, const ScalarFunction& xi_second, std::size_t n);

enum class SlopeForm { A, B, BB, C };
const char* slope_form_name(SlopeForm form);

/// The four equivalent forms of the relaxed slope; requires rho > 0 at every quadrature node.
double relaxed_slope(const SmoothDensity& rho, double alpha, SlopeForm form, double tol = 1e-10);
/// (1/2) integral rho^alpha (Delta log rho)^2.
double slope_plus(const SmoothDensity& rho, double alpha, double tol = 1e-10);

/// The two terms gamma int u^{gamma-1} (u')^4 and 3 int u^gamma (u')^2 u'' whose sum vanishes.
struct UsefulRelationTerms {
    double quartic = 0.0;
    double mixed = 0.0;
};
UsefulRelationTerms useful_relation(const SmoothDensity& u, double gamma, double tol = 1e-10);

/// Samples of V = rho^{-alpha/2} j and Sigma = -(2/alpha)(Delta rho^{alpha/2} - 4 (d rho^{alpha/4})^2).
struct ModifiedFluxSlope {
    std::vector<double> x;
    std::vector<double> v;
    std::vector<double> sigma;
    double half_v_squared = 0.0;      // (1/2) integral V^2 = R_alpha(rho, j)
    double half_sigma_squared = 0.0;  // (1/2) integral Sigma^2 = S_alpha(rho)
};
ModifiedFluxSlope modified_flux_slope(const SmoothDensity& rho, const ScalarFunction& j, double alpha,
                                      std::size_t samples = 256, double tol = 1e-10);

struct RefinementRow {
    std::size_t n = 0;
    double energy_discrete = 0.0;  // E_N(c(T))
    double energy_embedded = 0.0;  // E(iota_N c(T))
    double dissipation_discrete = 0.0;  // trapezoid of R_N + S_N over the recorded states
    double dissipation_embedded = 0.0;  // trapezoid of R(iota_N c, I_N J) + S(spline of c)
    double l1_to_next = 0.0;  // || c_N - coarse average of c_2N ||_{L^1_N}, NaN on the last row
    double order = 0.0;       // log2 of the ratio of consecutive l1_to_next, NaN where undefined
    std::size_t steps = 0;
};

struct RefinementProblem {
    SmoothDensity initial;  // sampled by cell averages at each N
    double t_end = 1e-4;
    double dt = 1e-6;  // shared by every N so that only the spatial error differs
    SolverConfig solver;
};

/// Runs the same initial profile at each n in n_list (each entry twice the previous).
std::vector<RefinementRow> refinement_study(const ActivitySpec& spec, const RefinementProblem& problem,
                                            std::span<const std::size_t> n_list);

}  // namespace dlss
