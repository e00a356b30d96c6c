#include "dlss/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "dlss/error.hpp"
#include "kinetics_impl.hpp"

namespace dlss {

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double l2_sq(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

// J_k for a raw vector that may not be a validated GridState (Newton trial points).
std::vector<double> raw_flux(const ActivitySpec& spec, std::span<const double> c) {
    const std::size_t n = c.size();
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    std::vector<double> j(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double y = detail::geometric_mean(c[(k + n - 1) % n], c[(k + 1) % n]);
        j[k] = n2 * jbar(spec, c[k], y);
    }
    return j;
}

std::vector<double> residual(const ActivitySpec& spec, std::span<const double> x, std::span<const double> c0,
                             double dt) {
    const GridFunction r = laplacian(raw_flux(spec, x));
    std::vector<double> f(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) f[k] = x[k] - c0[k] - dt * r[k];
    return f;
}

// Bound on the rounding error of the residual itself: the stencil sums dt N^2 (J_{k-1} - 2 J_k + J_{k+1}).
double residual_floor(const ActivitySpec& spec, std::span<const double> x, double dt) {
    const std::size_t n = x.size();
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const std::vector<double> j = raw_flux(spec, x);
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        m = std::max(m, std::abs(j[(k + n - 1) % n]) + 2.0 * std::abs(j[k]) + std::abs(j[(k + 1) % n]));
    return 64.0 * std::numeric_limits<double>::epsilon() * dt * n2 * m;
}

// Rounding in the cells perturbs the residual by about eps |dt d rhs/dc| |x|; the flux differences
// inside J lose up to N^2 relative digits, so on fine grids this dominates the flux bound above.
double conditioning_floor(const linalg::CyclicBandMatrix& scaled_jacobian, std::span<const double> x) {
    const std::size_t n = x.size();
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (int d = -2; d <= 2; ++d)
            row += std::abs(scaled_jacobian.band(i, d)) * std::abs(x[wrap(static_cast<std::ptrdiff_t>(i) + d, n)]);
        m = std::max(m, row);
    }
    return 16.0 * std::numeric_limits<double>::epsilon() * m;
}

double local_flux(const ActivitySpec& spec, double left, double centre, double right) {
    return jbar(spec, centre, detail::geometric_mean(left, right));
}

// Gradient of jbar(c_k, sqrt(c_{k-1} c_{k+1})) with respect to (c_{k-1}, c_k, c_{k+1}).
std::array<double, 3> stencil_gradient(const ActivitySpec& spec, double l, double m, double r, JacobianMode mode,
                                       double scale) {
    const bool positive = l > 0.0 && m > 0.0 && r > 0.0;
    if (positive && mode == JacobianMode::Analytic) {
        using detail::Dual;
        const double y = detail::geometric_mean(l, r);
        std::array<double, 3> g;
        if (m == y) {
            // on the diagonal jbar_x = -jbar_y = 2 y sigma(y, y)
            const double d = 2.0 * y * activity(spec, y, y);
            g = {-d * y / (2.0 * l), d, -d * y / (2.0 * r)};
        } else {
            const double jx = detail::jbar_positive(spec, Dual(m, 1.0), Dual(y, 0.0)).d;
            const double jy = detail::jbar_positive(spec, Dual(m, 0.0), Dual(y, 1.0)).d;
            g = {jy * (0.5 * std::sqrt(r) / std::sqrt(l)), jx, jy * (0.5 * std::sqrt(l) / std::sqrt(r))};
        }
        // extreme ratios between neighbours (deep tails) can overflow; those stencils are differenced
        if (std::isfinite(g[0]) && std::isfinite(g[1]) && std::isfinite(g[2])) return g;
    }
    std::array<double, 3> v{l, m, r};
    std::array<double, 3> g{};
    const double base = local_flux(spec, l, m, r);
    for (int i = 0; i < 3; ++i) {
        if (positive && v[i] > 1e-280) {
            const double h = 1e-6 * v[i];
            auto up = v, dn = v;
            up[i] += h;
            dn[i] -= h;
            g[i] = (local_flux(spec, up[0], up[1], up[2]) - local_flux(spec, dn[0], dn[1], dn[2])) / (2.0 * h);
        } else {
            const double h = 1e-7 * std::max({v[0], v[1], v[2], 1e-8 * scale});
            auto up = v;
            up[i] += h;
            g[i] = (local_flux(spec, up[0], up[1], up[2]) - base) / h;
        }
    }
    return g;
}

linalg::CyclicBandMatrix rhs_jacobian(const ActivitySpec& spec, std::span<const double> c, JacobianMode mode) {
    const std::size_t n = c.size();
    const double n4 = std::pow(static_cast<double>(n), 4);
    const double scale = max_abs(c);
    linalg::CyclicBandMatrix a(n, 2);
    // rhs_i = N^2 (J_{i-1} - 2 J_i + J_{i+1}), J_l = N^2 jbar(c_l, sqrt(c_{l-1} c_{l+1}))
    for (std::size_t l = 0; l < n; ++l) {
        const auto g = stencil_gradient(spec, c[(l + n - 1) % n], c[l], c[(l + 1) % n], mode, scale);
        for (int di = -1; di <= 1; ++di) {
            const std::size_t i = wrap(static_cast<std::ptrdiff_t>(l) + di, n);
            const double w = di == 0 ? -2.0 : 1.0;
            // column l + dj lies at offset (l + dj) - i = dj - di from row i
            for (int dj = -1; dj <= 1; ++dj) a.band(i, dj - di) += n4 * w * g[static_cast<std::size_t>(dj + 1)];
        }
    }
    return a;
}

struct NewtonOutcome {
    bool converged = false;
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0;
    std::string reason;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

NewtonOutcome newton(const ActivitySpec& spec, const SolverConfig& config, const GridState& c, double dt) {
    const std::size_t n = c.size();
    const std::vector<double>& c0 = c.vector();
    const double tol = config.newton_tol * std::max(1.0, max_abs(c0)) + 16.0 * std::numeric_limits<double>::epsilon() * max_abs(c0);
    const double degree = detail::jbar_degree(spec);
    const bool power_variable = degree < 1.0;
    NewtonOutcome out;
    out.x = c0;
    // Empty cells receiving mass start from the explicit inflow. For degree < 1 every empty cell is filled
    // in one step and the iteration in w converges from above, so they start at a fraction of the mean.
    if (power_variable) {
        const double seed = 1e-2 * std::accumulate(c0.begin(), c0.end(), 0.0) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            out.x[i] = std::max(c0[i], seed);
    } else {
        const std::vector<double> f0 = residual(spec, out.x, c0, dt);
        for (std::size_t i = 0; i < n; ++i)
            if (c0[i] == 0.0 && f0[i] < 0.0) out.x[i] = -f0[i];
    }
    std::vector<double> f = residual(spec, out.x, c0, dt);
    double r = max_abs(f);
    for (int it = 0;; ++it) {
        out.residual = r;
        out.iterations = it;
        linalg::CyclicBandMatrix m = rhs_jacobian(spec, out.x, config.jacobian);
        for (std::size_t i = 0; i < n; ++i)
            for (int d = -2; d <= 2; ++d) m.band(i, d) *= -dt;
        if (r <= tol + residual_floor(spec, out.x, dt) + conditioning_floor(m, out.x)) {
            out.converged = true;
            return out;
        }
        if (it >= config.newton_max_iter) {
            out.reason = "no convergence after " + std::to_string(it) + " iterations, residual " + fmt(r) + " (tolerance " + fmt(tol) + ")";
            return out;
        }
        for (std::size_t i = 0; i < n; ++i) m.band(i, 0) += 1.0;
        // For degree q < 1 the tail behaves like x - dt Delta(x^q) = c0, whose Newton map is singular at 0;
        // positive cells are iterated in w = x^q, i.e. column i is scaled by dx/dw = x^(1-q)/q.
        std::vector<double> col(n, 1.0);
        if (power_variable)
            for (std::size_t i = 0; i < n; ++i)
                if (out.x[i] > 0.0) col[i] = std::pow(out.x[i], 1.0 - degree) / degree;
        if (power_variable)
            for (std::size_t i = 0; i < n; ++i)
                for (int d = -2; d <= 2; ++d) m.band(i, d) *= col[wrap(static_cast<std::ptrdiff_t>(i) + d, n)];
        std::vector<double> minus_f(n);
        for (std::size_t i = 0; i < n; ++i) minus_f[i] = -f[i];
        std::vector<double> delta;
        try {
            delta = m.solve(minus_f);
        } catch (const Error& e) {
            out.reason = e.what();
            return out;
        }
        // Cells whose additive update would lose more than half their value take the log-variable
        // Newton update x exp(lambda delta / x) instead; both have derivative delta at lambda = 0.
        const double merit = l2_sq(f);
        double lambda = 1.0;
        bool accepted = false;
        std::vector<double> trial(n);
        for (; lambda >= 1e-12 && !accepted; lambda *= config.damping) {
            for (std::size_t i = 0; i < n; ++i) {
                const double xi = out.x[i];
                const double di = lambda * delta[i] * col[i];
                if (power_variable && xi > 0.0) {
                    const double w = std::pow(xi, degree) + lambda * delta[i];
                    const double xw = w > 0.0 ? std::pow(w, 1.0 / degree) : 0.0;
                    trial[i] = xw >= 0.5 * xi ? xw : xi * std::exp(di / xi);
                } else {
                    trial[i] = di >= -0.5 * xi ? xi + di : xi * std::exp(di / xi);
                }
            }
            std::vector<double> ft = residual(spec, trial, c0, dt);
            const double rt = max_abs(ft);
            if (!std::isfinite(rt)) continue;
            if (l2_sq(ft) < (1.0 - 1e-4 * lambda) * merit || rt <= tol) {
                out.x = trial;
                f = std::move(ft);
                r = rt;
                accepted = true;
            }
        }
        if (!accepted) {
            out.reason = "line search failed at residual " + fmt(r) + " (tolerance " + fmt(tol) + ")";
            return out;
        }
    }
}

void advance(const ActivitySpec& spec, const SolverConfig& config, const GridState& c, double dt, int depth,
             StepResult& result) {
    NewtonOutcome o = newton(spec, config, c, dt);
    result.newton_iterations += o.iterations;
    if (o.converged) {
        SubStep s;
        s.dt = dt;
        s.state = GridState(std::move(o.x));
        s.flux = flux(spec, s.state);
        result.residual = std::max(result.residual, o.residual);
        result.substeps.push_back(std::move(s));
        return;
    }
    if (depth >= config.max_halvings)
        fail(ErrorCode::Solver, "implicit Euler step failed after " + std::to_string(depth) +
                                    " halvings (dt = " + fmt(dt) + "): " + o.reason);
    ++result.halvings;
    advance(spec, config, c, 0.5 * dt, depth + 1, result);
    const GridState mid = result.substeps.back().state;
    advance(spec, config, mid, 0.5 * dt, depth + 1, result);
}

}  // namespace

double SolverConfig::resolved_dt(std::size_t n) const {
    if (dt > 0.0) return dt;
    return cfl / std::pow(static_cast<double>(n), 4);
}

void SolverConfig::validate() const {
    auto bad = [](const std::string& what) { fail(ErrorCode::InvalidArgument, "solver config: " + what); };
    if (!(dt >= 0.0) || !std::isfinite(dt)) bad("dt must be >= 0");
    if (dt == 0.0 && !(cfl > 0.0)) bad("cfl must be > 0 when dt is not given");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) bad("t_end must be >= 0");
    if (!(newton_tol > 0.0)) bad("newton_tol must be > 0");
    if (newton_max_iter < 1) bad("newton_max_iter must be >= 1");
    if (!(damping > 0.0 && damping < 1.0)) bad("damping must lie in (0, 1)");
    if (record_every < 1) bad("record_every must be >= 1");
    if (max_halvings < 0) bad("max_halvings must be >= 0");
}

linalg::CyclicBandMatrix jacobian(const ActivitySpec& spec, const GridState& c, JacobianMode mode) {
    return rhs_jacobian(spec, c.vector(), mode);
}

StepResult step(const ActivitySpec& spec, const SolverConfig& config, const GridState& c, double dt) {
    config.validate();
    if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "step: dt must be > 0");
    StepResult result;
    advance(spec, config, c, dt, 0, result);
    result.state = result.substeps.back().state;
    result.flux = result.substeps.back().flux;
    return result;
}

Trajectory solve(const ActivitySpec& spec, const SolverConfig& config, const GridState& c0) {
    config.validate();
    Trajectory tr;
    tr.spec = spec;
    tr.config = config;
    const double dt = config.resolved_dt(c0.size());
    const double mass0 = c0.mass();

    GridState c = c0;
    FluxField j = flux(spec, c);
    DiagnosticsRecord d = evaluate_diagnostics(spec, 0.0, c, j);
    const double e0 = d.energy;
    double dissipation_rate = d.primal + d.slope;
    DissipationIntegral integral;
    auto snapshot = [&](double t) {
        d.cum_dissipation = integral.value();
        d.edb_residual = d.energy - e0 + integral.value();
        tr.times.push_back(t);
        tr.states.push_back(c);
        tr.fluxes.push_back(j);
        tr.diagnostics.push_back(d);
    };
    snapshot(0.0);

    double t = 0.0;
    tr.stats.min_density_positive_t = std::numeric_limits<double>::infinity();
    const auto steps = static_cast<std::size_t>(std::max(0.0, std::ceil(config.t_end / dt - 1e-9)));
    for (std::size_t s = 1; s <= steps; ++s) {
        const double t_next = s == steps ? config.t_end : static_cast<double>(s) * dt;
        StepResult r = step(spec, config, c, t_next - t);
        tr.stats.steps += 1;
        tr.stats.halvings += static_cast<std::size_t>(r.halvings);
        tr.stats.newton_iterations += static_cast<std::size_t>(r.newton_iterations);
        tr.stats.max_residual = std::max(tr.stats.max_residual, r.residual);
        for (SubStep& sub : r.substeps) {
            const double e_prev = d.energy;
            t += sub.dt;
            c = std::move(sub.state);
            j = std::move(sub.flux);
            d = evaluate_diagnostics(spec, t, c, j);
            const double rate = d.primal + d.slope;
            integral.add(sub.dt, dissipation_rate, rate);
            dissipation_rate = rate;
            tr.stats.substeps += 1;
            tr.stats.max_mass_drift = std::max(tr.stats.max_mass_drift, std::abs(d.mass - mass0));
            tr.stats.min_density_positive_t = std::min(tr.stats.min_density_positive_t, d.min_density);
            tr.stats.max_entropy_increase = std::max(tr.stats.max_entropy_increase, d.energy - e_prev);
        }
        t = t_next;
        d.t = t;
        if (s % static_cast<std::size_t>(config.record_every) == 0 || s == steps) snapshot(t);
    }
    if (steps == 0) tr.stats.min_density_positive_t = c.min();
    tr.right_endpoint_start = integral.used_right_endpoint();
    return tr;
}

double edb_functional(const ActivitySpec& spec, const Trajectory& trajectory) {
    const std::size_t n = trajectory.states.size();
    if (n == 0) fail(ErrorCode::InvalidArgument, "edb_functional: empty trajectory");
    if (trajectory.fluxes.size() != n || trajectory.times.size() != n)
        fail(ErrorCode::InvalidArgument, "edb_functional: inconsistent trajectory");
    DissipationIntegral integral;
    double prev = primal_dissipation(spec, trajectory.states[0], trajectory.fluxes[0]) + slope(spec, trajectory.states[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const double cur =
            primal_dissipation(spec, trajectory.states[i], trajectory.fluxes[i]) + slope(spec, trajectory.states[i]);
        integral.add(trajectory.times[i] - trajectory.times[i - 1], prev, cur);
        prev = cur;
    }
    return entropy(trajectory.states[n - 1]) - entropy(trajectory.states[0]) + integral.value();
}

}  // namespace dlss
