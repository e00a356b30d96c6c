#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dlss {

/// rho(t, x) = kappa (ct - x)^delta for x < ct and 0 beyond, an exact front of
/// d_t rho = -d_xx(rho^(alpha-2)(rho rho'' - (rho')^2)) for alpha > 1.
struct TravelingWave {
    double alpha = 2.0;
    double kappa = 1.0;
    double delta = 3.0;   // 3 / (alpha - 1)
    double speed = 12.0;  // kappa^(alpha-1) 3 (alpha + 2) / (alpha - 1)^2

    /// Throws InvalidArgument for alpha <= 1 or kappa <= 0.
    static TravelingWave make(double alpha, double kappa);
    double operator()(double t, double x) const;
    /// True when the profile is a classical C^4 solution, i.e. 1 < alpha < 7/4.
    bool classical() const { return alpha < 1.75; }
};

struct WaveResidualRow {
    double h = 0.0;
    double residual = 0.0;  // max over sample points of the PDE defect
    double relative = 0.0;  // residual / max |d_t rho|
    double order = 0.0;     // log2 of the defect ratio to the previous (twice larger) h; NaN on the first row
};

struct WaveResidualOptions {
    double t = 1.0;
    double margin = 0.25;  // distance ct - x kept from the front
    double width = 1.0;    // sample ct - x in [margin, margin + width]
    std::size_t points = 64;
    std::vector<double> h_ladder{4e-2, 2e-2, 1e-2, 5e-3};
};

/**
 * PDE defect of the closed form, all derivatives taken with fourth-order central differences in
 * long double (d_t by the 5-point first-derivative stencil; the flux term by nesting 5-point
 * stencils for rho', rho'' and the outer d_xx). Only points with 4h < margin are used.
 */
std::vector<WaveResidualRow> wave_residual(const TravelingWave& wave, const WaveResidualOptions& options = {});

/// gamma = 1 / (3 + alpha).
double similarity_gamma(double alpha);

/**
 * Third-order form of gamma y Phi = (Phi^(alpha-2)(Phi Phi'' - Phi'^2))':
 * Phi''' = gamma y Phi^(2-alpha) - (alpha-3) Phi' Phi'' / Phi + (alpha-2) Phi'^3 / Phi^2.
 * Throws Domain for Phi <= 0.
 */
std::array<double, 3> profile_ode_rhs(double alpha, double y, const std::array<double, 3>& state);

/// (Phi^(alpha-2)(Phi Phi'' - Phi'^2))' - gamma y Phi for a profile given with three derivatives.
double profile_residual(double alpha, double y, double phi, double d1, double d2, double d3);

struct ShootingOptions {
    double b_lo = -5.0;  // Phi''(0) on the crossing side
    double b_hi = 0.0;   // Phi''(0) on the turning-up side
    double ode_tol = 1e-12;
    double event_threshold = 1e-8;
    double y_max = 200.0;
    double b_tol = 1e-12;
    int max_bisections = 200;
    std::size_t samples = 20001;  // profile grid on [0, y_end]
};

enum class TailKind { None, Algebraic, Support };
const char* tail_kind_name(TailKind kind);

struct ProfileSolution {
    double alpha = 1.0;
    double gamma = 0.25;
    double b_star = 0.0;
    double b_uncertainty = 0.0;  // width of the final bisection bracket
    int bisections = 0;
    std::vector<double> y;
    std::vector<double> phi;
    double y_end = 0.0;  // where Phi reached the event threshold (or y_max)

    TailKind tail = TailKind::None;
    double tail_exponent = 0.0;  // p in Phi ~ y^-p (algebraic) or Phi ~ (y_alpha - y)^p (support); NaN for None
    double tail_stderr = 0.0;
    double tail_curvature = 0.0;  // quadratic coefficient of the log-log fit; large means no clean power law
    double support_radius = 0.0;  // y_alpha; NaN unless Support
    double fit_phi_lo = 0.0;
    double fit_phi_hi = 0.0;
    std::size_t fit_points = 0;
};

/**
 * Shooting from Phi(0) = 1, Phi'(0) = 0, Phi''(0) = b with adaptive Dormand-Prince. A trajectory
 * whose Phi' turns positive lies above the profile; one that reaches event_threshold lies below.
 * Bisection on b until the bracket is narrower than b_tol; the reported profile is the trajectory
 * at the crossing end. Tails are fitted on Phi in [10 event_threshold, 1e-3].
 * Throws Shooting when the bracket has no sign change or the integrator breaks down.
 */
ProfileSolution shoot_profile(double alpha, const ShootingOptions& options = {});

/// Least-squares fit of log phi against log y (algebraic) on the given window; used by shoot_profile.
struct PowerFit {
    double exponent = 0.0;
    double stderr_ = 0.0;
    double curvature = 0.0;
    std::size_t points = 0;
};
PowerFit fit_algebraic_tail(std::span<const double> y, std::span<const double> phi, double phi_lo, double phi_hi);
/// Fit of log phi against log(y_alpha - y), minimising the residual over y_alpha past the last sample.
PowerFit fit_support_tail(std::span<const double> y, std::span<const double> phi, double phi_lo, double phi_hi,
                          double& support_radius);

}  // namespace dlss
