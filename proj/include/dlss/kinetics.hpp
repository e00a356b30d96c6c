#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dlss/torus.hpp"

namespace dlss {

enum class ActivityFamily {
    StolarskyPower,  // 2 s_alpha^{2alpha-2} / (x^alpha + y^alpha)
    RootDifference,  // (4/alpha^2) ((x^{alpha/2} - y^{alpha/2}) / (x - y))^2
    Mrss,            // 2 / (x + y), alpha = 1
    MassAction,      // 1, alpha = 2
    Constant,        // fixed value; not admissible in general, used as a negative control
};

std::string_view family_name(ActivityFamily family);
/// Accepts stolarsky-power, root-difference, mrss, mass-action, constant.
ActivityFamily parse_family(std::string_view name);

/// Activity sigma_bar_alpha(x, y) with its mobility exponent.
struct ActivitySpec {
    ActivityFamily family = ActivityFamily::StolarskyPower;
    double alpha = 1.0;
    double epsilon_diag = 1e-7;  // relative width of the x ~ y series branch
    double constant = 1.0;       // value for ActivityFamily::Constant

    /// Validates alpha > 0 and the fixed exponents of mrss (1) and mass-action (2).
    static ActivitySpec make(ActivityFamily family, double alpha, double epsilon_diag = 1e-7);
    static ActivitySpec constant_value(double value, double alpha);
};

/// (x^a - y^a) / (a (x - y)), with the log-mean limit at a = 0 and x^{a-1} on the diagonal.
double power_difference_quotient(double x, double y, double a, double epsilon_diag = 1e-7);

double stolarsky_mean(double x, double y, double p, double epsilon_diag = 1e-7);

double activity(const ActivitySpec& spec, double x, double y);
/// Continuous extension of activity(x, y) * (x^2 - y^2).
double jbar(const ActivitySpec& spec, double x, double y);
/// activity(x, y) * x * y, zero on the axes.
double mobility(const ActivitySpec& spec, double x, double y);

class FluxField : public GridFunction {
public:
    using GridFunction::GridFunction;
    FluxField() = default;
    explicit FluxField(GridFunction values) : GridFunction(std::move(values)) {}
};

/// J_k = N^2 jbar(c_k, sqrt(c_{k-1} c_{k+1})).
FluxField flux(const ActivitySpec& spec, const GridState& c);
/// Right-hand side laplacian(J[c]) of the rate equation.
GridFunction rhs(const ActivitySpec& spec, const GridState& c);
/// Mobility per cell, m_k = mobility(c_k, sqrt(c_{k-1} c_{k+1})).
GridFunction cell_mobility(const ActivitySpec& spec, const GridState& c);
/// Geometric neighbour mean sqrt(c_{k-1}) sqrt(c_{k+1}).
GridFunction neighbour_mean(std::span<const double> c);

struct InequalityMargin {
    std::string name;
    double worst_relative_violation = 0.0;  // max over samples of (rhs - lhs) / scale, <= 0 if never violated
    std::size_t violations = 0;             // samples above the reporting tolerance
    double worst_x = 0.0;
    double worst_y = 0.0;
};

struct AdmissibilityReport {
    ActivitySpec spec;
    std::size_t samples = 0;
    double tolerance = 1e-9;
    std::vector<InequalityMargin> margins;
    bool admissible() const;
};

/**
 * Evaluates the two activity bounds, the Stolarsky lemma chain, the mobility bounds and the
 * homogeneity of sigma_bar and m_bar on pairs drawn log-uniformly from [1e-6, 1e6]^2.
 */
AdmissibilityReport check_admissibility(const ActivitySpec& spec, std::size_t samples, std::uint64_t seed,
                                        double tolerance = 1e-9);

}  // namespace dlss
