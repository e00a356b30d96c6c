#include "dlss/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dlss/error.hpp"
#include "dlss/integrator.hpp"
#include "dlss/linalg.hpp"
#include "dlss/variational.hpp"

namespace dlss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double fractional(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

std::size_t cell_index(double x, std::size_t n, double& offset) {
    const double r = fractional(x) * static_cast<double>(n);
    auto k = static_cast<std::size_t>(r);
    if (k >= n) k = n - 1;
    offset = (r - static_cast<double>(k)) / static_cast<double>(n);
    return k;
}

double integrate(const ScalarFunction& f, std::size_t panels, double panel_offset, double tol) {
    if (panels == 0) return simpson_richardson(f, 0.0, 1.0, tol).value;
    double sum = 0.0;
    const double h = 1.0 / static_cast<double>(panels);
    for (std::size_t k = 0; k < panels; ++k) {
        const double a = panel_offset + static_cast<double>(k) * h;
        sum += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, a + h, 5, tol);
    }
    return sum;
}

double integrate(const ScalarFunction& f, const SmoothDensity& rho, double tol) {
    return integrate(f, rho.panels, rho.panel_offset, tol);
}

struct Jet {
    double rho, d1, d2;
};

Jet positive_jet(const SmoothDensity& rho, double x) {
    const Jet j{rho.value(x), rho.d1(x), rho.d2(x)};
    if (!(j.rho > 0.0)) fail(ErrorCode::Domain, "relaxed slope: density must be positive");
    return j;
}

// Delta rho^(a/2) - 4 (d rho^(a/4))^2 and its pieces, from rho, rho', rho''.
struct SlopeTerms {
    double u1, u2, v1;
};

SlopeTerms slope_terms(const Jet& j, double a) {
    const double h = 0.5 * a;
    const double p = std::pow(j.rho, h - 1.0);
    return {h * p * j.d1, h * p * j.d2 + h * (h - 1.0) * p / j.rho * j.d1 * j.d1,
            0.25 * a * std::pow(j.rho, 0.25 * a - 1.0) * j.d1};
}

double slope_integrand(const Jet& j, double a, SlopeForm form) {
    const double pre = 2.0 / (a * a);
    switch (form) {
        case SlopeForm::A: {
            const SlopeTerms t = slope_terms(j, a);
            const double s = t.u2 - 4.0 * t.v1 * t.v1;
            return pre * s * s;
        }
        case SlopeForm::B: {
            const SlopeTerms t = slope_terms(j, a);
            const double v2 = t.v1 * t.v1;
            return pre * (t.u2 * t.u2 + 16.0 / 3.0 * v2 * v2);
        }
        case SlopeForm::BB: {
            const SlopeTerms t = slope_terms(j, a);
            const double u = std::pow(j.rho, 0.5 * a);
            const double s = u * t.u2 - t.u1 * t.u1;
            return pre * s * s / std::pow(j.rho, a);
        }
        case SlopeForm::C: {
            const double r2 = j.d1 * j.d1;
            return 0.5 * (j.d2 * j.d2 * std::pow(j.rho, a - 2.0) +
                          (2.0 * a - 3.0) / 3.0 * r2 * r2 * std::pow(j.rho, a - 4.0));
        }
    }
    return 0.0;
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorCode::InvalidArgument, "alpha must be positive");
}

}  // namespace

PiecewiseConstantDensity::PiecewiseConstantDensity(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) fail(ErrorCode::InvalidArgument, "embedding: empty state");
}

double PiecewiseConstantDensity::operator()(double x) const {
    double offset = 0.0;
    return values_[cell_index(x, values_.size(), offset)];
}

double PiecewiseConstantDensity::integral() const { return mean(values_); }

double PiecewiseConstantDensity::lp_norm(double p) const { return dlss::lp_norm(values_, p); }

PiecewiseConstantDensity embed_density(std::span<const double> c) {
    return PiecewiseConstantDensity(std::vector<double>(c.begin(), c.end()));
}

GridFunction embed_dual(const ScalarFunction& phi, std::size_t n, double tol) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "embed_dual: n must be positive");
    GridFunction out(n);
    const double h = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = cell_average(phi, static_cast<double>(k) * h, static_cast<double>(k + 1) * h, tol);
    return out;
}

// Nodal values of I_N J are the averages (J_{k-1} + J_k)/2 minus mean(J): their discrete Laplacian
// is the average of the two adjacent cell curvatures, which is what u'' = (laplacian J)_k forces.
FluxEmbedding::FluxEmbedding(std::span<const double> j) {
    const std::size_t n = j.size();
    if (n == 0) fail(ErrorCode::InvalidArgument, "flux embedding: empty flux");
    const double h = 1.0 / static_cast<double>(n);
    const GridFunction f = laplacian(j);
    dropped_mean_ = mean(j);
    value_.resize(n);
    slope_.resize(n);
    curvature_ = f.vector();
    for (std::size_t k = 0; k < n; ++k) value_[k] = 0.5 * (j[wrap(static_cast<std::ptrdiff_t>(k) - 1, n)] + j[k]) - dropped_mean_;
    for (std::size_t k = 0; k < n; ++k) {
        const double jump = 0.5 * (j[wrap(static_cast<std::ptrdiff_t>(k) + 1, n)] - j[wrap(static_cast<std::ptrdiff_t>(k) - 1, n)]);
        slope_[k] = jump / h - 0.5 * f[k] * h;
    }
}

std::size_t FluxEmbedding::cell(double x, double& offset) const { return cell_index(x, curvature_.size(), offset); }

double FluxEmbedding::operator()(double x) const {
    double t = 0.0;
    const std::size_t k = cell(x, t);
    return value_[k] + t * (slope_[k] + 0.5 * curvature_[k] * t);
}

double FluxEmbedding::derivative(double x) const {
    double t = 0.0;
    const std::size_t k = cell(x, t);
    return slope_[k] + curvature_[k] * t;
}

double FluxEmbedding::second_derivative(double x) const {
    double t = 0.0;
    return curvature_[cell(x, t)];
}

double FluxEmbedding::l1_norm() const {
    const std::size_t n = curvature_.size();
    const double h = 1.0 / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = 0.5 * curvature_[k], b = slope_[k], c = value_[k];
        auto antiderivative = [&](double t) { return t * (c + t * (0.5 * b + t * a / 3.0)); };
        // sign changes of a t^2 + b t + c inside (0, h)
        double cuts[4] = {0.0, 0.0, 0.0, 0.0};
        int m = 0;
        cuts[m++] = 0.0;
        if (a != 0.0) {
            const double disc = b * b - 4.0 * a * c;
            if (disc > 0.0) {
                const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
                double r1 = q / a, r2 = q != 0.0 ? c / q : r1;
                if (r1 > r2) std::swap(r1, r2);
                if (r1 > 0.0 && r1 < h) cuts[m++] = r1;
                if (r2 > 0.0 && r2 < h) cuts[m++] = r2;
            }
        } else if (b != 0.0) {
            const double r = -c / b;
            if (r > 0.0 && r < h) cuts[m++] = r;
        }
        cuts[m++] = h;
        for (int i = 0; i + 1 < m; ++i) total += std::abs(antiderivative(cuts[i + 1]) - antiderivative(cuts[i]));
    }
    return total;
}

FluxEmbedding embed_flux(std::span<const double> j) { return FluxEmbedding(j); }

SmoothDensity sine_density(double mean_value, double amplitude, int mode) {
    const double w = 2.0 * std::numbers::pi * mode;
    SmoothDensity d;
    d.value = [=](double x) { return mean_value + amplitude * std::sin(w * x); };
    d.d1 = [=](double x) { return amplitude * w * std::cos(w * x); };
    d.d2 = [=](double x) { return -amplitude * w * w * std::sin(w * x); };
    return d;
}

SmoothDensity spline_interpolant(std::span<const double> c) {
    const std::size_t n = c.size();
    if (n < 3) fail(ErrorCode::InvalidArgument, "spline: need at least 3 cells");
    const double h = 1.0 / static_cast<double>(n);
    // second derivatives M_k: M_{k-1} + 4 M_k + M_{k+1} = 6 (laplacian c)_k
    std::vector<double> sub(n, 1.0), diag(n, 4.0), sup(n, 1.0);
    GridFunction lap = laplacian(c);
    for (double& v : lap.vector()) v *= 6.0;
    auto data = std::make_shared<std::pair<std::vector<double>, std::vector<double>>>(
        std::vector<double>(c.begin(), c.end()), linalg::solve_cyclic_tridiagonal(sub, diag, sup, lap.vector()));
    // piece k runs from x_k = (k + 1/2) h to x_{k+1}
    auto locate = [n, h](double x, double& t) {
        double offset = 0.0;
        const std::size_t k = cell_index(x - 0.5 * h, n, offset);
        t = offset / h;
        return k;
    };
    SmoothDensity d;
    d.value = [=](double x) {
        double t = 0.0;
        const std::size_t k = locate(x, t), k1 = (k + 1) % n;
        const auto& [y, m] = *data;
        const double s = 1.0 - t;
        return s * y[k] + t * y[k1] + h * h / 6.0 * ((s * s * s - s) * m[k] + (t * t * t - t) * m[k1]);
    };
    d.d1 = [=](double x) {
        double t = 0.0;
        const std::size_t k = locate(x, t), k1 = (k + 1) % n;
        const auto& [y, m] = *data;
        const double s = 1.0 - t;
        return (y[k1] - y[k]) / h + h / 6.0 * (-(3.0 * s * s - 1.0) * m[k] + (3.0 * t * t - 1.0) * m[k1]);
    };
    d.d2 = [=](double x) {
        double t = 0.0;
        const std::size_t k = locate(x, t), k1 = (k + 1) % n;
        const auto& [y, m] = *data;
        return (1.0 - t) * m[k] + t * m[k1];
    };
    d.panels = n;
    d.panel_offset = 0.5 * h;
    return d;
}

double continuous_entropy(const ScalarFunction& rho, double tol) {
    return simpson_richardson([&](double x) { return entropy_density(rho(x)); }, 0.0, 1.0, tol).value;
}

double continuous_entropy(const PiecewiseConstantDensity& rho) {
    double s = 0.0;
    for (double x : rho.values()) s += entropy_density(x);
    return s / static_cast<double>(rho.size());
}

double continuous_primal(const ScalarFunction& rho, const ScalarFunction& j, double alpha, double tol) {
    check_alpha(alpha);
    auto integrand = [&](double x) {
        const double r = rho(x), v = j(x);
        if (r < 0.0) fail(ErrorCode::Domain, "primal dissipation: negative density");
        if (r == 0.0) return v == 0.0 ? 0.0 : kInf;
        return 0.5 * v * v / std::pow(r, alpha);
    };
    return simpson_richardson(integrand, 0.0, 1.0, tol).value;
}

double continuous_dual(const ScalarFunction& rho, const ScalarFunction& eta, double alpha, double tol) {
    check_alpha(alpha);
    auto integrand = [&](double x) {
        const double r = rho(x), e = eta(x);
        if (r < 0.0) fail(ErrorCode::Domain, "dual dissipation: negative density");
        return 0.5 * std::pow(r, alpha) * e * e;
    };
    return simpson_richardson(integrand, 0.0, 1.0, tol).value;
}

double embedded_primal(std::span<const double> c, std::span<const double> j, double alpha) {
    check_alpha(alpha);
    if (c.size() != j.size() || c.empty()) fail(ErrorCode::InvalidArgument, "embedded_primal: size mismatch");
    // R sees the flux itself, not only its Laplacian, so the mean dropped by I_N is restored here
    const FluxEmbedding u(j);
    const std::size_t n = c.size();
    const double h = 1.0 / static_cast<double>(n);
    // three-point Gauss-Legendre is exact for the quartic u^2 on each cell
    const double g = std::sqrt(0.6);
    const double nodes[3] = {-g, 0.0, g};
    const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double sq = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double v = u((static_cast<double>(k) + 0.5 * (1.0 + nodes[i])) * h) + u.dropped_mean();
            sq += weights[i] * v * v;
        }
        sq *= 0.5 * h;
        if (sq == 0.0) continue;
        if (c[k] < 0.0) fail(ErrorCode::Domain, "embedded_primal: negative density");
        if (c[k] == 0.0) return kInf;
        total += 0.5 * sq / std::pow(c[k], alpha);
    }
    return total;
}

double commutator_defect(const ScalarFunction& xi, const ScalarFunction& xi_second, std::size_t n) {
    if (n < 3) fail(ErrorCode::InvalidArgument, "commutator: need at least 3 cells");
    const GridFunction a = embed_dual(xi_second, n);
    const GridFunction b = laplacian(embed_dual(xi, n));
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    return worst;
}

const char* slope_form_name(SlopeForm form) {
    switch (form) {
        case SlopeForm::A: return "a";
        case SlopeForm::B: return "b";
        case SlopeForm::BB: return "bb";
        case SlopeForm::C: return "c";
    }
    return "?";
}

double relaxed_slope(const SmoothDensity& rho, double alpha, SlopeForm form, double tol) {
    check_alpha(alpha);
    return integrate([&](double x) { return slope_integrand(positive_jet(rho, x), alpha, form); }, rho, tol);
}

double slope_plus(const SmoothDensity& rho, double alpha, double tol) {
    check_alpha(alpha);
    auto integrand = [&](double x) {
        const Jet j = positive_jet(rho, x);
        const double l = j.d2 / j.rho - (j.d1 / j.rho) * (j.d1 / j.rho);
        return 0.5 * std::pow(j.rho, alpha) * l * l;
    };
    return integrate(integrand, rho, tol);
}

UsefulRelationTerms useful_relation(const SmoothDensity& u, double gamma, double tol) {
    UsefulRelationTerms out;
    out.quartic = gamma * integrate([&](double x) {
        const Jet j = positive_jet(u, x);
        const double d2 = j.d1 * j.d1;
        return std::pow(j.rho, gamma - 1.0) * d2 * d2;
    }, u, tol);
    out.mixed = 3.0 * integrate([&](double x) {
        const Jet j = positive_jet(u, x);
        return std::pow(j.rho, gamma) * j.d1 * j.d1 * j.d2;
    }, u, tol);
    return out;
}

ModifiedFluxSlope modified_flux_slope(const SmoothDensity& rho, const ScalarFunction& j, double alpha,
                                      std::size_t samples, double tol) {
    check_alpha(alpha);
    if (samples == 0) fail(ErrorCode::InvalidArgument, "modified_flux_slope: samples must be positive");
    ModifiedFluxSlope out;
    auto sigma = [&](double x) {
        const SlopeTerms t = slope_terms(positive_jet(rho, x), alpha);
        return -2.0 / alpha * (t.u2 - 4.0 * t.v1 * t.v1);
    };
    auto v = [&](double x) { return j(x) / std::pow(positive_jet(rho, x).rho, 0.5 * alpha); };
    for (std::size_t i = 0; i < samples; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(samples);
        out.x.push_back(x);
        out.v.push_back(v(x));
        out.sigma.push_back(sigma(x));
    }
    out.half_v_squared = integrate([&](double x) { const double w = v(x); return 0.5 * w * w; }, rho, tol);
    out.half_sigma_squared = integrate([&](double x) { const double s = sigma(x); return 0.5 * s * s; }, rho, tol);
    return out;
}

std::vector<RefinementRow> refinement_study(const ActivitySpec& spec, const RefinementProblem& problem,
                                            std::span<const std::size_t> n_list) {
    if (n_list.empty()) fail(ErrorCode::InvalidArgument, "refinement: empty N list");
    for (std::size_t i = 0; i + 1 < n_list.size(); ++i)
        if (n_list[i + 1] != 2 * n_list[i]) fail(ErrorCode::InvalidArgument, "refinement: N must double");
    if (!(problem.dt > 0.0) || !(problem.t_end > 0.0)) fail(ErrorCode::InvalidArgument, "refinement: need dt, t_end > 0");

    std::vector<RefinementRow> rows;
    std::vector<GridState> finals;
    for (std::size_t n : n_list) {
        GridFunction c0 = embed_dual(problem.initial.value, n);
        SolverConfig config = problem.solver;
        config.dt = problem.dt;
        config.t_end = problem.t_end;
        const Trajectory tr = solve(spec, config, GridState(c0.vector()));

        RefinementRow row;
        row.n = n;
        row.steps = tr.stats.steps;
        const GridState& last = tr.states.back();
        row.energy_discrete = entropy(last);
        row.energy_embedded = continuous_entropy(embed_density(last));
        // both dissipations on the recorded time grid, so the gap is purely spatial
        std::vector<double> discrete(tr.states.size()), embedded(tr.states.size());
        for (std::size_t i = 0; i < tr.states.size(); ++i) {
            const GridState& c = tr.states[i];
            discrete[i] = primal_dissipation(spec, c, tr.fluxes[i]) + slope(spec, c);
            embedded[i] = embedded_primal(c, tr.fluxes[i], spec.alpha) +
                          relaxed_slope(spline_interpolant(c), spec.alpha, SlopeForm::A);
        }
        for (std::size_t i = 0; i + 1 < embedded.size(); ++i) {
            const double half = 0.5 * (tr.times[i + 1] - tr.times[i]);
            row.dissipation_discrete += half * (discrete[i] + discrete[i + 1]);
            row.dissipation_embedded += half * (embedded[i] + embedded[i + 1]);
        }
        rows.push_back(row);
        finals.push_back(last);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].l1_to_next = nan;
        rows[i].order = nan;
        if (i + 1 == rows.size()) continue;
        const std::size_t n = rows[i].n;
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            sum += std::abs(finals[i][k] - 0.5 * (finals[i + 1][2 * k] + finals[i + 1][2 * k + 1]));
        rows[i].l1_to_next = sum / static_cast<double>(n);
    }
    for (std::size_t i = 0; i + 2 < rows.size(); ++i)
        rows[i + 1].order = std::log2(rows[i].l1_to_next / rows[i + 1].l1_to_next);
    return rows;
}

}  // namespace dlss
