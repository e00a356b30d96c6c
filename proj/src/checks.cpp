#include "dlss/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dlss/continuum.hpp"
#include "dlss/initial.hpp"
#include "dlss/integrator.hpp"
#include "dlss/variational.hpp"

namespace dlss {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Tracks the worst relative violation of small <= big over a sample loop.
struct Margin {
    double tolerance;
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t samples = 0, violations = 0;

    void add(double small, double big) {
        const double scale = std::max({std::abs(small), std::abs(big), 1e-300});
        add_relative((small - big) / scale);
    }
    void add_relative(double v) {
        ++samples;
        if (!(v <= worst)) worst = v;
        if (!(v <= tolerance)) ++violations;
    }
    CheckResult result(std::string group, std::string name) const {
        CheckResult r;
        r.group = std::move(group);
        r.name = std::move(name);
        r.measured = worst;
        r.bound = tolerance;
        r.samples = samples;
        r.violations = violations;
        r.passed = violations == 0 && samples > 0;
        r.detail = "worst relative violation " + format(worst) + ", tolerance " + format(tolerance);
        return r;
    }
};

std::string alpha_tag(double alpha) { return "alpha=" + format(alpha); }

std::vector<double> random_state(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> logu(std::log(lo), std::log(hi));
    std::vector<double> c(n);
    for (double& v : c) v = std::exp(logu(rng));
    return c;
}

}  // namespace

std::vector<CheckResult> admissibility_checks(const ActivitySpec& spec, std::size_t samples, std::uint64_t seed,
                                              double tolerance) {
    const AdmissibilityReport rep = check_admissibility(spec, samples, seed, tolerance);
    std::vector<CheckResult> out;
    for (const auto& m : rep.margins) {
        CheckResult r;
        r.group = "admissibility";
        r.name = std::string(family_name(spec.family)) + " " + alpha_tag(spec.alpha) + ": " + m.name;
        r.measured = m.worst_relative_violation;
        r.bound = tolerance;
        r.samples = samples;
        r.violations = m.violations;
        r.passed = m.violations == 0;
        r.detail = "worst relative violation " + format(m.worst_relative_violation) + " at (x, y) = (" +
                   format(m.worst_x) + ", " + format(m.worst_y) + ")";
        out.push_back(std::move(r));
    }
    return out;
}

CheckResult magical_estimate_check(std::size_t samples, std::uint64_t seed, double tolerance) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logu(std::log(1e-6), std::log(1e6));
    std::uniform_real_distribution<double> qd(1.0, 8.0);
    std::bernoulli_distribution sign(0.5);
    Margin m{tolerance};
    for (std::size_t i = 0; i < samples; ++i) {
        const double s = (sign(rng) ? -1.0 : 1.0) * std::exp(logu(rng));
        const double w = std::exp(logu(rng));
        double q = qd(rng);
        if (q == 1.0) q = 8.0;
        m.add(cosh_primal(s), q / (q - 1.0) * perspective(s, w) + 4.0 * std::pow(w, q) / (q - 1.0));
    }
    return m.result("gradient-structure", "magical estimate");
}

CheckResult monotonicity_check(std::size_t samples, std::uint64_t seed, double tolerance) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logu(std::log(1e-6), std::log(1e6));
    std::uniform_real_distribution<double> logl(std::log(1e-3), std::log(1e3));
    std::bernoulli_distribution sign(0.5);
    Margin m{tolerance};
    for (std::size_t i = 0; i < samples; ++i) {
        const double s = (sign(rng) ? -1.0 : 1.0) * std::exp(logu(rng));
        const double w = std::exp(logu(rng));
        double l1 = std::exp(logl(rng)), l2 = std::exp(logl(rng));
        if (l1 > l2) std::swap(l1, l2);
        m.add(perspective(l1 * s, l1 * l1 * w), perspective(l2 * s, l2 * l2 * w));
    }
    return m.result("gradient-structure", "perspective monotonicity");
}

CheckResult spatial_regularity_check(const ActivitySpec& spec, std::size_t states, std::uint64_t seed,
                                     double tolerance) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> nd(3, 64);
    std::uniform_real_distribution<double> spread(0.0, std::log(1e3));
    const double a = spec.alpha;
    Margin m{tolerance};
    for (std::size_t i = 0; i < states; ++i) {
        const std::size_t n = nd(rng);
        // spreads from nearly uniform to six decades, so both regimes of the bound are exercised
        const double r = std::exp(spread(rng));
        const std::vector<double> c = random_state(rng, n, 1.0 / r, r);
        std::vector<double> half(n), quarter(n);
        for (std::size_t k = 0; k < n; ++k) {
            half[k] = std::pow(c[k], 0.5 * a);
            quarter[k] = std::pow(c[k], 0.25 * a);
        }
        const GridFunction lap = laplacian(half), dm = backward_diff(quarter), dp = forward_diff(quarter);
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double m4 = dm[k] * dm[k], p4 = dp[k] * dp[k];
            sum += lap[k] * lap[k] + m4 * m4 + p4 * p4;
        }
        m.add(sum / static_cast<double>(n) / (24.0 * a * a), slope(spec, GridState(c)));
    }
    return m.result("inequalities", std::string(family_name(spec.family)) + " " + alpha_tag(a) + ": spatial regularity");
}

CheckResult polynomial_check(std::size_t grid, double tolerance) {
    Margin m{tolerance};
    for (std::size_t i = 0; i < grid; ++i) {
        const double x = 20.0 * static_cast<double>(i) / static_cast<double>(grid - 1);
        for (std::size_t j = 0; j < grid; ++j) {
            const double t = x * x * static_cast<double>(j) / static_cast<double>(grid - 1);
            const double a = 15.0 * t * t, b = 2.0 * t * (x - 11.0) * (x - 1.0),
                         c = (x - 1.0) * (x - 1.0) * (3.0 + 22.0 * x + 15.0 * x * x);
            const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1.0});
            m.add_relative(-(a + b + c) / scale);
        }
    }
    return m.result("inequalities", "S(x,t) >= 0 on the x-t grid");
}

std::vector<CheckResult> fenchel_young_checks(std::size_t samples, std::uint64_t seed, double tolerance) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logs(std::log(1e-4), std::log(1e8));
    std::uniform_real_distribution<double> logr(std::log(1e-4), std::log(40.0));
    std::bernoulli_distribution sign(0.5);
    Margin gap{tolerance}, equality{tolerance};
    for (std::size_t i = 0; i < samples; ++i) {
        const double s = (sign(rng) ? -1.0 : 1.0) * std::exp(logs(rng));
        const double r = (sign(rng) ? -1.0 : 1.0) * std::exp(logr(rng));
        gap.add(s * r, cosh_primal(s) + cosh_star(r));
        const double s_star = cosh_star_derivative(r);
        const double lhs = cosh_primal(s_star) + cosh_star(r);
        const double rhs = s_star * r;
        equality.add_relative(std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
    }
    return {gap.result("gradient-structure", "Fenchel-Young inequality"),
            equality.result("gradient-structure", "Fenchel-Young equality on s = 2 sinh(r/2)")};
}

std::vector<CheckResult> duality_checks(const ActivitySpec& spec, std::size_t states, std::uint64_t seed,
                                        double tolerance) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> nd(3, 64);
    std::normal_distribution<double> normal;
    Margin identity{tolerance}, gap{tolerance};
    for (std::size_t i = 0; i < states; ++i) {
        const std::size_t n = nd(rng);
        const GridState c(random_state(rng, n, 0.1, 10.0));
        const double s = slope(spec, c);
        const double d = dual_dissipation(spec, c, driving_force(c));
        identity.add_relative(std::abs(s - d) / std::max({s, d, 1e-300}));
        std::vector<double> j(n), xi(n);
        const double nn = static_cast<double>(n) * static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            j[k] = nn * normal(rng);
            xi[k] = nn * normal(rng);
        }
        gap.add(inner_product(j, xi), primal_dissipation(spec, c, j) + dual_dissipation(spec, c, xi));
    }
    const std::string tag = std::string(family_name(spec.family)) + " " + alpha_tag(spec.alpha);
    return {identity.result("gradient-structure", tag + ": slope = dual dissipation at -lap log c"),
            gap.result("gradient-structure", tag + ": duality gap <J, xi> <= R + R*")};
}

std::vector<CheckResult> embedding_checks(std::size_t states, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> nd(1, 1024);
    std::size_t mismatches = 0;
    Margin norms{1e-14};
    for (std::size_t i = 0; i < states; ++i) {
        const std::size_t n = nd(rng);
        std::vector<double> c = random_state(rng, n, 1e-3, 1e3);
        const double m = mean(c);
        for (double& v : c) v /= m;
        const PiecewiseConstantDensity rho = embed_density(c);
        if (entropy(GridState(c)) != continuous_entropy(rho)) ++mismatches;
        for (double p : {1.0, 2.0, 4.0}) {
            // integral of |rho|^p over the torus, summed independently of the discrete norm
            double s = 0.0;
            const double h = 1.0 / static_cast<double>(n);
            for (std::size_t k = 0; k < n; ++k) s += h * std::pow(std::abs(rho(h * (static_cast<double>(k) + 0.5))), p);
            const double cont = std::pow(s, 1.0 / p), disc = lp_norm(c, p);
            norms.add_relative(std::abs(cont - disc) / std::max(disc, 1e-300));
        }
    }
    CheckResult ident;
    ident.group = "embedding";
    ident.name = "E_N(c) = E(iota_N c) bit for bit";
    ident.samples = states;
    ident.violations = mismatches;
    ident.measured = static_cast<double>(mismatches);
    ident.bound = 0.0;
    ident.passed = mismatches == 0;
    ident.detail = std::to_string(mismatches) + " of " + std::to_string(states) + " states differ";
    return {ident, norms.result("embedding", "L^p norm preservation, p in {1, 2, 4}")};
}

CheckResult flux_embedding_check(std::size_t fluxes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> level(4, 10);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> offset(-2.0, 2.0);
    double worst = 0.0;
    std::size_t violations = 0;
    for (std::size_t i = 0; i < fluxes; ++i) {
        const std::size_t n = std::size_t{1} << level(rng);
        const double shift = offset(rng);
        std::vector<double> j(n);
        for (double& v : j) v = normal(rng) + shift;
        const double ratio = embed_flux(j).l1_norm() / lp_norm(j, 1.0);
        worst = std::max(worst, ratio);
        if (!(ratio <= 2.0)) ++violations;
    }
    CheckResult r;
    r.group = "embedding";
    r.name = "flux embedding ||I_N J||_1 <= 2 ||J||_1";
    r.measured = worst;
    r.bound = 2.0;
    r.samples = fluxes;
    r.violations = violations;
    r.passed = violations == 0;
    r.detail = "largest ratio " + format(worst);
    return r;
}

std::vector<CheckResult> commutator_checks(const std::vector<std::size_t>& n_list) {
    const double w = 2.0 * std::numbers::pi;
    std::vector<CheckResult> out;
    for (std::size_t n : n_list) {
        CheckResult r;
        r.group = "embedding";
        r.name = "commutator N=" + std::to_string(n);
        r.measured = commutator_defect([w](double x) { return std::sin(w * x); },
                                       [w](double x) { return -w * w * std::sin(w * x); }, n);
        r.bound = w * w * w / (3.0 * static_cast<double>(n));
        r.samples = n;
        r.passed = r.measured <= r.bound;
        r.violations = r.passed ? 0 : 1;
        r.detail = "measured " + format(r.measured) + " vs ||xi'''||/(3N) = " + format(r.bound) +
                   ", N * measured = " + format(r.measured * static_cast<double>(n));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<CheckResult> relaxed_slope_checks(double alpha) {
    const SmoothDensity u = sine_density(1.0, 0.3, 1);
    std::vector<CheckResult> out;
    const double ref = slope_plus(u, alpha, 1e-12);
    double worst = 0.0;
    for (SlopeForm f : {SlopeForm::A, SlopeForm::B, SlopeForm::BB, SlopeForm::C})
        worst = std::max(worst, std::abs(relaxed_slope(u, alpha, f, 1e-12) - ref) / ref);
    CheckResult forms;
    forms.group = "continuum";
    forms.name = alpha_tag(alpha) + ": relaxed slope forms a, b, bb, c agree with S_+";
    forms.measured = worst;
    forms.bound = 1e-8;
    forms.samples = 4;
    forms.passed = worst <= forms.bound;
    forms.violations = forms.passed ? 0 : 1;
    forms.detail = "largest relative deviation " + format(worst);
    out.push_back(forms);
    for (double gamma : {-3.0, 1.0, alpha - 3.0}) {
        const UsefulRelationTerms t = useful_relation(u, gamma, 1e-12);
        CheckResult r;
        r.group = "continuum";
        r.name = alpha_tag(alpha) + ": useful relation gamma=" + format(gamma);
        r.measured = std::abs(t.quartic + t.mixed) / std::max(std::abs(t.quartic), 1e-300);
        r.bound = 1e-8;
        r.samples = 1;
        r.passed = r.measured <= r.bound;
        r.violations = r.passed ? 0 : 1;
        r.detail = "terms " + format(t.quartic) + " and " + format(t.mixed);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<EdbRow> edb_study(const ActivitySpec& spec, const std::vector<double>& c0, double t_end, double dt0,
                              int halvings, const SolverConfig& base) {
    std::vector<EdbRow> rows;
    double dt = dt0;
    for (int h = 0; h <= halvings; ++h, dt *= 0.5) {
        SolverConfig config = base;
        config.dt = dt;
        config.t_end = t_end;
        config.record_every = 1;
        const Trajectory tr = solve(spec, config, GridState(c0));
        EdbRow row;
        row.dt = dt;
        row.residual = edb_functional(spec, tr);
        row.steps = tr.stats.steps;
        row.order = rows.empty() ? kNaN : std::log2(std::abs(rows.back().residual) / std::abs(row.residual));
        rows.push_back(row);
    }
    return rows;
}

CheckResult edb_check(double alpha, std::size_t n) {
    const ActivitySpec spec = ActivitySpec::make(ActivityFamily::StolarskyPower, alpha);
    const double t_end = 1e-4;
    const std::vector<EdbRow> rows = edb_study(spec, perturbed_uniform(n, 0.5, 1), t_end, t_end / 10.0, 4);
    CheckResult r;
    r.group = "edb";
    r.name = alpha_tag(alpha) + " N=" + std::to_string(n) + ": EDB residual order under dt halving";
    r.measured = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < rows.size(); ++i) r.measured = std::min(r.measured, rows[i].order);
    r.bound = 0.9;
    r.samples = rows.size();
    r.passed = r.measured >= r.bound;
    r.violations = r.passed ? 0 : 1;
    r.detail = "|L|:";
    for (const auto& row : rows) r.detail += " " + format(std::abs(row.residual));
    return r;
}

CheckResult negative_control_check(std::size_t samples, std::uint64_t seed) {
    const ActivitySpec bad = ActivitySpec::constant_value(10.0, 1.0);
    const AdmissibilityReport rep = check_admissibility(bad, samples, seed);
    std::size_t violations = 0;
    for (const auto& m : rep.margins) violations += m.violations;
    CheckResult r;
    r.group = "negative-control";
    r.name = "constant activity 10, alpha=1 must violate A3";
    r.samples = samples;
    r.violations = violations;
    r.measured = static_cast<double>(violations);
    r.passed = violations > 0;
    r.detail = std::to_string(violations) + " violations detected";
    return r;
}

std::vector<CheckResult> run_checks(const CheckOptions& o) {
    std::vector<CheckResult> out;
    auto append = [&](std::vector<CheckResult> v) { out.insert(out.end(), v.begin(), v.end()); };
    for (double a : o.alphas) {
        const ActivitySpec spec = ActivitySpec::make(ActivityFamily::StolarskyPower, a);
        append(admissibility_checks(spec, o.pair_samples, o.seed, o.tolerance));
        out.push_back(spatial_regularity_check(spec, o.state_samples, o.seed + 1, o.tolerance));
        append(duality_checks(spec, o.state_samples / 10, o.seed + 2, o.tolerance));
        append(relaxed_slope_checks(a));
    }
    out.push_back(magical_estimate_check(o.pair_samples, o.seed + 3, o.tolerance));
    out.push_back(monotonicity_check(o.pair_samples, o.seed + 4, o.tolerance));
    out.push_back(polynomial_check(o.polynomial_grid, o.tolerance));
    append(fenchel_young_checks(o.pair_samples, o.seed + 5, o.tolerance));
    append(embedding_checks(o.flux_samples, o.seed + 6));
    out.push_back(flux_embedding_check(o.flux_samples, o.seed + 7));
    append(commutator_checks(o.commutator_n));
    if (o.edb)
        for (double a : {1.0, 2.0}) out.push_back(edb_check(a));
    if (o.negative_control) out.push_back(negative_control_check(o.pair_samples / 10, o.seed + 8));
    return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

}  // namespace dlss
