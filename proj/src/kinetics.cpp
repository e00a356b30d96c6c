#include "dlss/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dlss/error.hpp"
#include "kinetics_impl.hpp"

namespace dlss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonnegative(double x, double y, const char* where) {
    if (!(x >= 0.0) || !(y >= 0.0)) fail(ErrorCode::Domain, std::string(where) + ": negative argument");
}

}  // namespace

std::string_view family_name(ActivityFamily family) {
    switch (family) {
        case ActivityFamily::StolarskyPower: return "stolarsky-power";
        case ActivityFamily::RootDifference: return "root-difference";
        case ActivityFamily::Mrss: return "mrss";
        case ActivityFamily::MassAction: return "mass-action";
        case ActivityFamily::Constant: return "constant";
    }
    return "unknown";
}

ActivityFamily parse_family(std::string_view name) {
    for (auto f : {ActivityFamily::StolarskyPower, ActivityFamily::RootDifference, ActivityFamily::Mrss,
                   ActivityFamily::MassAction, ActivityFamily::Constant})
        if (family_name(f) == name) return f;
    fail(ErrorCode::InvalidArgument, "unknown activity family '" + std::string(name) + "'");
}

ActivitySpec ActivitySpec::make(ActivityFamily family, double alpha, double epsilon_diag) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorCode::InvalidArgument, "activity: alpha must be > 0");
    if (!(epsilon_diag > 0.0) || epsilon_diag > 1e-2)
        fail(ErrorCode::InvalidArgument, "activity: epsilon_diag must lie in (0, 1e-2]");
    if (family == ActivityFamily::Mrss && alpha != 1.0)
        fail(ErrorCode::InvalidArgument, "activity: mrss is defined for alpha = 1 only");
    if (family == ActivityFamily::MassAction && alpha != 2.0)
        fail(ErrorCode::InvalidArgument, "activity: mass-action is defined for alpha = 2 only");
    ActivitySpec s;
    s.family = family;
    s.alpha = alpha;
    s.epsilon_diag = epsilon_diag;
    return s;
}

ActivitySpec ActivitySpec::constant_value(double value, double alpha) {
    if (!(value >= 0.0)) fail(ErrorCode::InvalidArgument, "activity: constant value must be >= 0");
    ActivitySpec s = make(ActivityFamily::StolarskyPower, alpha);
    s.family = ActivityFamily::Constant;
    s.constant = value;
    return s;
}

double power_difference_quotient(double x, double y, double a, double epsilon_diag) {
    require_nonnegative(x, y, "power_difference_quotient");
    const double big = std::max(x, y);
    const double small = std::min(x, y);
    if (big == 0.0) {
        if (a > 1.0) return 0.0;
        if (a == 1.0) return 1.0;
        return kInf;
    }
    if (small == 0.0) {
        if (a <= 0.0) return kInf;
        return std::pow(big, a - 1.0) / a;
    }
    return detail::power_quotient(x, y, a, epsilon_diag);
}

double stolarsky_mean(double x, double y, double p, double epsilon_diag) {
    require_nonnegative(x, y, "stolarsky_mean");
    const double big = std::max(x, y);
    const double small = std::min(x, y);
    if (big == small) return x;
    if (small == 0.0) {
        if (p <= 0.0) return 0.0;
        if (std::abs(p - 1.0) < 1e-9) return big / std::exp(1.0);
        return big * std::pow(p, 1.0 / (1.0 - p));
    }
    if (big - small <= epsilon_diag * big) {
        const double mid = 0.5 * (x + y);
        const double h = (big - small) / (2.0 * mid);
        return mid * (1.0 + (p - 2.0) * h * h / 6.0);
    }
    if (std::abs(p) < 1e-9) return (big - small) / (std::log(big) - std::log(small));
    if (std::abs(p - 1.0) < 1e-9) {
        // identric mean exp((x log x - y log y) / (x - y) - 1)
        const double r = small / big;
        return big * std::exp(r * std::log(r) / (r - 1.0) - 1.0);
    }
    const double l = detail::power_quotient(big, small, p, epsilon_diag);
    return std::exp(std::log(l) / (p - 1.0));
}

namespace {

// sigma(1, r) for the two power families, 0 <= r <= 1; sigma is (alpha - 2)-homogeneous.
double scaled_activity(const ActivitySpec& spec, double r) {
    const double a = spec.alpha;
    if (spec.family == ActivityFamily::StolarskyPower) {
        const double l = power_difference_quotient(1.0, r, a, spec.epsilon_diag);
        return 2.0 * l * l / (1.0 + std::pow(r, a));
    }
    const double l = power_difference_quotient(1.0, r, 0.5 * a, spec.epsilon_diag);
    return l * l;
}

}  // namespace

double activity(const ActivitySpec& spec, double x, double y) {
    require_nonnegative(x, y, "activity");
    const double a = spec.alpha;
    switch (spec.family) {
        case ActivityFamily::MassAction: return 1.0;
        case ActivityFamily::Constant: return spec.constant;
        case ActivityFamily::Mrss:
            if (x + y == 0.0) fail(ErrorCode::Domain, "activity: mrss is undefined at (0, 0)");
            return 2.0 / (x + y);
        case ActivityFamily::StolarskyPower:
        case ActivityFamily::RootDifference: break;
    }
    if (x == 0.0 && y == 0.0) {
        if (a > 2.0) return 0.0;
        fail(ErrorCode::Domain, "activity: no continuous extension at (0, 0) for alpha <= 2");
    }
    const double big = std::max(x, y);
    return std::pow(big, a - 2.0) * scaled_activity(spec, std::min(x, y) / big);
}

double jbar(const ActivitySpec& spec, double x, double y) {
    require_nonnegative(x, y, "jbar");
    if (x == y) return 0.0;
    if (x > 0.0 && y > 0.0) return detail::jbar_positive(spec, x, y);
    // one argument is zero
    const double z = std::max(x, y);
    const double sign = x > y ? 1.0 : -1.0;
    const double a = spec.alpha;
    switch (spec.family) {
        case ActivityFamily::StolarskyPower: return sign * (2.0 / (a * a)) * std::pow(z, a);
        case ActivityFamily::RootDifference: return sign * (4.0 / (a * a)) * std::pow(z, a);
        case ActivityFamily::Mrss: return sign * 2.0 * z;
        case ActivityFamily::MassAction: return sign * z * z;
        case ActivityFamily::Constant: return sign * spec.constant * z * z;
    }
    return 0.0;
}

double mobility(const ActivitySpec& spec, double x, double y) {
    require_nonnegative(x, y, "mobility");
    if (x == 0.0 || y == 0.0) return 0.0;
    switch (spec.family) {
        case ActivityFamily::StolarskyPower:
        case ActivityFamily::RootDifference: {
            const double big = std::max(x, y);
            const double r = std::min(x, y) / big;
            return std::pow(big, spec.alpha) * scaled_activity(spec, r) * r;
        }
        default: return activity(spec, x, y) * x * y;
    }
}

GridFunction neighbour_mean(std::span<const double> c) {
    const std::size_t n = c.size();
    GridFunction g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = detail::geometric_mean(c[(k + n - 1) % n], c[(k + 1) % n]);
    return g;
}

FluxField flux(const ActivitySpec& spec, const GridState& c) {
    const std::size_t n = c.size();
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const GridFunction g = neighbour_mean(c);
    FluxField j(n);
    for (std::size_t k = 0; k < n; ++k) j[k] = n2 * jbar(spec, c[k], g[k]);
    return j;
}

GridFunction rhs(const ActivitySpec& spec, const GridState& c) { return laplacian(flux(spec, c)); }

GridFunction cell_mobility(const ActivitySpec& spec, const GridState& c) {
    const GridFunction g = neighbour_mean(c);
    GridFunction m(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) m[k] = mobility(spec, c[k], g[k]);
    return m;
}

bool AdmissibilityReport::admissible() const {
    return std::all_of(margins.begin(), margins.end(), [](const InequalityMargin& m) { return m.violations == 0; });
}

AdmissibilityReport check_admissibility(const ActivitySpec& spec, std::size_t samples, std::uint64_t seed,
                                        double tolerance) {
    AdmissibilityReport report;
    report.spec = spec;
    report.samples = samples;
    report.tolerance = tolerance;
    const char* names[] = {
        "A3 upper: max(x^a, y^a) >= sigma x y",
        "A3 lower: sigma >= L_a^2 min(x^-a, y^-a)",
        "lemma: s_a^(a-1) sqrt(xy) <= (x^a + y^a)/2",
        "lemma: (x^a + y^a)/2 <= max(x^a, y^a)",
        "mobility upper: max(x^a, y^a) >= m",
        "mobility lower: m >= s_a^(2a-2) x y min(x^-a, y^-a)",
        "homogeneity: sigma(lx, ly) = l^(a-2) sigma(x, y)",
        "homogeneity: m(lx, ly) = l^a m(x, y)",
    };
    constexpr std::size_t kChecks = 8;
    report.margins.resize(kChecks);
    for (std::size_t i = 0; i < kChecks; ++i) report.margins[i].name = names[i];
    for (auto& m : report.margins) m.worst_relative_violation = -kInf;

    auto record_violation = [&](std::size_t i, double v, double x, double y) {
        auto& m = report.margins[i];
        if (v > m.worst_relative_violation) {
            m.worst_relative_violation = v;
            m.worst_x = x;
            m.worst_y = y;
        }
        if (!(v <= tolerance)) ++m.violations;
    };
    // violation of lhs_small <= rhs_big, relative to the larger magnitude
    auto record = [&](std::size_t i, double lhs_small, double rhs_big, double x, double y) {
        const double scale = std::max({std::abs(lhs_small), std::abs(rhs_big), 1e-300});
        record_violation(i, (lhs_small - rhs_big) / scale, x, y);
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logu(std::log(1e-6), std::log(1e6));
    std::uniform_real_distribution<double> logl(std::log(1e-3), std::log(1e3));
    const double a = spec.alpha;
    for (std::size_t s = 0; s < samples; ++s) {
        const double x = std::exp(logu(rng));
        const double y = std::exp(logu(rng));
        const double lam = std::exp(logl(rng));
        const double xa = std::pow(x, a), ya = std::pow(y, a);
        const double maxa = std::max(xa, ya);
        const double sigma = activity(spec, x, y);
        const double l = power_difference_quotient(x, y, a, spec.epsilon_diag);
        const double m = mobility(spec, x, y);
        record(0, sigma * x * y, maxa, x, y);
        record(1, l * l / maxa, sigma, x, y);
        record(2, l * std::sqrt(x) * std::sqrt(y), 0.5 * (xa + ya), x, y);
        record(3, 0.5 * (xa + ya), maxa, x, y);
        record(4, m, maxa, x, y);
        record(5, l * l * x * y / maxa, m, x, y);
        const double hs = activity(spec, lam * x, lam * y);
        const double hs_ref = std::pow(lam, a - 2.0) * sigma;
        const double hs_err = std::abs(hs - hs_ref) / std::max(std::abs(hs_ref), 1e-300);
        record_violation(6, hs_err, x, y);
        const double hm = mobility(spec, lam * x, lam * y);
        const double hm_ref = std::pow(lam, a) * m;
        const double hm_err = std::abs(hm - hm_ref) / std::max(std::abs(hm_ref), 1e-300);
        record_violation(7, hm_err, x, y);
    }
    return report;
}

}  // namespace dlss
