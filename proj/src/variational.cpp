#include "dlss/variational.hpp"

#include <cmath>
#include <limits>

#include "dlss/error.hpp"

namespace dlss {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double scale4(std::size_t n) {
    const double dn = static_cast<double>(n);
    return dn * dn * dn * dn;
}
}  // namespace

double entropy_density(double x) {
    if (x < 0.0 || std::isnan(x)) fail(ErrorCode::Domain, "entropy: negative density");
    if (x == 0.0) return 1.0;
    const double u = x - 1.0;
    if (std::abs(u) < 1e-2) {
        // sum_{n>=2} (-1)^n u^n / (n (n-1))
        double term = u * u, sum = 0.0;
        for (int n = 2; n <= 10; ++n) {
            sum += term / (n * (n - 1.0));
            term *= -u;
        }
        return sum;
    }
    return x * std::log(x) - u;
}

double entropy(const GridState& c) {
    double s = 0.0;
    for (double x : c.vector()) s += entropy_density(x);
    return s / static_cast<double>(c.size());
}

double cosh_star(double r) {
    const double s = std::sinh(0.25 * r);
    return 8.0 * s * s;
}

double cosh_star_derivative(double r) { return 2.0 * std::sinh(0.5 * r); }

double cosh_primal(double s) { return perspective(s, 1.0); }

double cosh_primal_derivative(double s) { return 2.0 * std::asinh(0.5 * s); }

double perspective(double s, double w) {
    if (w < 0.0 || std::isnan(w)) fail(ErrorCode::Domain, "perspective: negative weight");
    if (w == 0.0) return s == 0.0 ? 0.0 : kInf;
    if (s == 0.0) return 0.0;
    // w C(s/w) = 2 s asinh(s/(2w)) - 4 (sqrt(w^2 + s^2/4) - w), the bracket written without cancellation
    const double as = std::abs(s);
    const double u = as / (2.0 * w);
    const double ash = u > 1e8 ? std::log(as) - std::log(w) : std::asinh(u);
    const double root = std::hypot(w, 0.5 * as) + w;
    return 2.0 * as * ash - as * (as / root);
}

double primal_dissipation(const ActivitySpec& spec, const GridState& c, std::span<const double> j) {
    const std::size_t n = c.size();
    if (j.size() != n) fail(ErrorCode::InvalidArgument, "primal_dissipation: length mismatch");
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const GridFunction m = cell_mobility(spec, c);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += perspective(n2 * j[k], n2 * n2 * m[k]);
    return s / static_cast<double>(n);
}

double dual_dissipation(const ActivitySpec& spec, const GridState& c, std::span<const double> xi) {
    const std::size_t n = c.size();
    if (xi.size() != n) fail(ErrorCode::InvalidArgument, "dual_dissipation: length mismatch");
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const GridFunction m = cell_mobility(spec, c);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (m[k] == 0.0) continue;
        s += n2 * n2 * m[k] * cosh_star(xi[k] / n2);
    }
    return s / static_cast<double>(n);
}

double slope(const ActivitySpec& spec, const GridState& c) {
    const std::size_t n = c.size();
    const GridFunction g = neighbour_mean(c);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = c[k], y = g[k];
        if (x == y) continue;
        // sigma (x - y)^2 = jbar(x, y) (x - y) / (x + y)
        s += jbar(spec, x, y) * ((x - y) / (x + y));
    }
    return 2.0 * scale4(n) * s / static_cast<double>(n);
}

GridFunction driving_force(const GridState& c) {
    if (!c.strictly_positive()) fail(ErrorCode::Domain, "driving_force: state has zero cells");
    std::vector<double> lg(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) lg[k] = std::log(c[k]);
    GridFunction xi = laplacian(lg);
    for (std::size_t k = 0; k < c.size(); ++k) xi[k] = -xi[k];
    return xi;
}

FluxField constitutive_flux(const ActivitySpec& spec, const GridState& c, std::span<const double> xi) {
    const std::size_t n = c.size();
    if (xi.size() != n) fail(ErrorCode::InvalidArgument, "constitutive_flux: length mismatch");
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const GridFunction m = cell_mobility(spec, c);
    FluxField j(n);
    for (std::size_t k = 0; k < n; ++k) j[k] = n2 * m[k] * cosh_star_derivative(xi[k] / n2);
    return j;
}

DiagnosticsRecord evaluate_diagnostics(const ActivitySpec& spec, double t, const GridState& c,
                                       std::span<const double> j) {
    DiagnosticsRecord r;
    r.t = t;
    r.energy = entropy(c);
    r.primal = primal_dissipation(spec, c, j);
    r.slope = slope(spec, c);
    r.mass = c.mass();
    r.min_density = c.min();
    return r;
}

void DissipationIntegral::add(double dt, double left, double right) {
    if (std::isfinite(left)) {
        value_ += 0.5 * dt * (left + right);
    } else {
        value_ += dt * right;
        right_endpoint_used_ = true;
    }
}

}  // namespace dlss
