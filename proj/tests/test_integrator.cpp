#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dlss/error.hpp"
#include "dlss/initial.hpp"
#include "dlss/integrator.hpp"
#include "dlss/kinetics.hpp"
#include "dlss/variational.hpp"

using namespace dlss;
using doctest::Approx;

namespace {

ActivitySpec sp(double a) { return ActivitySpec::make(ActivityFamily::StolarskyPower, a); }

std::vector<double> add(const std::vector<double>& x, const GridFunction& k, double h) {
    std::vector<double> y(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += h * k[i];
    return y;
}

std::vector<double> rk4(const ActivitySpec& spec, std::vector<double> c, double dt, int steps) {
    for (int s = 0; s < steps; ++s) {
        const auto k1 = rhs(spec, GridState(c));
        const auto k2 = rhs(spec, GridState(add(c, k1, dt / 2)));
        const auto k3 = rhs(spec, GridState(add(c, k2, dt / 2)));
        const auto k4 = rhs(spec, GridState(add(c, k3, dt)));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return c;
}

void check_structure(const Trajectory& tr) {
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
        CHECK(std::abs(tr.states[i].mass() - tr.states[0].mass()) <= 1e-11);
        if (i > 0) CHECK(tr.diagnostics[i].energy <= tr.diagnostics[i - 1].energy + 1e-10);
    }
    CHECK(tr.stats.max_mass_drift <= 1e-11);
    CHECK(tr.stats.max_entropy_increase <= 1e-10);
}

}  // namespace

TEST_CASE("solver config validation") {
    SolverConfig c;
    CHECK_NOTHROW(c.validate());
    c.damping = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.dt = -1;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    CHECK(c.resolved_dt(10) == Approx(0.1 / 1e4));
}

TEST_CASE("uniform state is a fixed point") {
    SolverConfig config;
    config.dt = 1e-5;
    config.t_end = 1e-4;
    const auto tr = solve(sp(2), config, GridState::uniform(32));
    for (const auto& s : tr.states)
        for (std::size_t k = 0; k < 32; ++k) CHECK(s[k] == 1.0);
    for (const auto& d : tr.diagnostics) CHECK(d.energy == 0.0);
}

TEST_CASE("implicit Euler converges to an explicit RK4 reference at first order") {
    const auto spec = sp(2);
    const auto c0 = perturbed_uniform(32, 0.3, 1);
    const double t_end = 1e-4;
    const auto ref = rk4(spec, c0, 1e-7, 1000);
    double previous = 0.0;
    for (double dt : {1e-5, 5e-6, 2.5e-6}) {
        SolverConfig config;
        config.dt = dt;
        config.t_end = t_end;
        const auto tr = solve(spec, config, GridState(c0));
        double err = 0.0;
        for (std::size_t k = 0; k < 32; ++k) err = std::max(err, std::abs(tr.states.back()[k] - ref[k]));
        if (previous > 0) CHECK(previous / err == Approx(2.0).epsilon(0.1));
        previous = err;
        check_structure(tr);
    }
}

TEST_CASE("linearized decay for alpha = 1") {
    // at c = 1 every power family has sigma = 1, so u' = -lap lap u and mode 1 decays with
    // lambda = N^4 (2 sin(pi/N))^4; implicit Euler damps E by (1 + dt lambda)^-2 per step
    const std::size_t n = 32;
    const double lambda = std::pow(n * 2.0 * std::sin(std::numbers::pi / n), 4);
    SolverConfig config;
    config.dt = 1e-6;
    config.t_end = 2e-5;
    const auto tr = solve(sp(1), config, GridState(perturbed_uniform(n, 1e-4, 1)));
    const double predicted = std::pow(1 + config.dt * lambda, -2.0 * static_cast<double>(tr.stats.steps));
    CHECK(tr.diagnostics.back().energy / tr.diagnostics.front().energy == Approx(predicted).epsilon(1e-3));
}

TEST_CASE("structure preservation on perturbed and bump data") {
    for (double a : {0.5, 1.0, 2.0, 4.0, 7.0}) {
        CAPTURE(a);
        SolverConfig config;
        config.t_end = 2e-6;
        config.dt = 2e-8;
        auto tr = solve(sp(a), config, GridState(perturbed_uniform(64, 0.5, 1)));
        check_structure(tr);
        CHECK(tr.stats.min_density_positive_t > 0.0);
        tr = solve(sp(a), config, GridState(bump_profile(64)));
        check_structure(tr);
    }
}

TEST_CASE("analytic Jacobian") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    for (double a : {0.5, 1.0, 2.0, 4.0}) {
        std::vector<double> v(16);
        for (double& x : v) x = u(rng);
        const GridState c(v);
        const auto jac = jacobian(sp(a), c);
        const auto fd = jacobian(sp(a), c, JacobianMode::FiniteDifference);
        const double h = 1e-6 * *std::max_element(v.begin(), v.end());
        double scale = 0.0;
        for (std::size_t i = 0; i < 16; ++i)
            for (int d = -2; d <= 2; ++d) scale = std::max(scale, std::abs(jac.band(i, d)));
        for (std::size_t j = 0; j < 16; ++j) {
            auto up = v, down = v;
            up[j] += h;
            down[j] -= h;
            const auto rp = rhs(sp(a), GridState(up));
            const auto rm = rhs(sp(a), GridState(down));
            for (int d = -2; d <= 2; ++d) {
                const std::size_t i = (j + 16 - d) % 16;  // row i sees column j at offset d
                const double central = (rp[i] - rm[i]) / (2 * h);
                CHECK(jac.band(i, d) == Approx(central).epsilon(1e-5).scale(scale));
                CHECK(jac.band(i, d) == Approx(fd.band(i, d)).epsilon(1e-5).scale(scale));
            }
        }
        // constants lie in the left kernel: column sums vanish
        for (std::size_t j = 0; j < 16; ++j) {
            double sum = 0.0;
            for (int d = -2; d <= 2; ++d) sum += jac.band((j + 16 - d) % 16, d);
            CHECK(std::abs(sum) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("Fourier symbol of the linearization at c = 1") {
    const auto spec = ActivitySpec::make(ActivityFamily::MassAction, 2.0);
    const std::size_t n = 32;
    const auto jac = jacobian(spec, GridState::uniform(n));
    for (std::size_t m = 0; m <= n / 2; ++m) {
        std::vector<double> v(n);
        for (std::size_t k = 0; k < n; ++k) v[k] = std::cos(2 * std::numbers::pi * m * k / n);
        const auto w = jac.apply(v);
        const double symbol = -std::pow(n * 2.0 * std::sin(std::numbers::pi * m / n), 4);
        CHECK(symbol <= 0.0);
        for (std::size_t k = 0; k < n; ++k) CHECK(w[k] == Approx(symbol * v[k]).epsilon(1e-10).scale(std::pow(4.0 * n, 4)));
    }
}

TEST_CASE("step splits on failure rather than clipping") {
    SolverConfig config;
    config.newton_max_iter = 1;
    config.max_halvings = 0;
    CHECK_THROWS_AS(step(sp(2), config, GridState(perturbed_uniform(32, 0.9, 1)), 1e-3), Error);
    config.newton_max_iter = 50;
    config.max_halvings = 10;
    const auto r = step(sp(2), config, GridState(perturbed_uniform(32, 0.9, 1)), 1e-3);
    CHECK(r.state.min() > 0.0);
    CHECK(r.state.mass() == Approx(1.0).epsilon(1e-12));
}
