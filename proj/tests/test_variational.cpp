#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/tools/minima.hpp>

#include "dlss/initial.hpp"
#include "dlss/integrator.hpp"
#include "dlss/kinetics.hpp"
#include "dlss/variational.hpp"

using namespace dlss;
using doctest::Approx;

namespace {

ActivitySpec sp(double a) { return ActivitySpec::make(ActivityFamily::StolarskyPower, a); }
ActivitySpec rd(double a) { return ActivitySpec::make(ActivityFamily::RootDifference, a); }
const double inf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("entropy") {
    CHECK(entropy(GridState::uniform(7)) == 0.0);
    CHECK(entropy(GridState({2.0, 0.0})) == Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(entropy(GridState({1, 2, 3, 0.7})) == Approx(0.43311469159177676).epsilon(1e-15));
    std::mt19937_64 rng(8);
    std::exponential_distribution<double> e(1.0);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> v(10);
        double s = 0;
        for (double& x : v) s += (x = e(rng));
        for (double& x : v) x *= 10 / s;
        CHECK(entropy(GridState(v)) >= 0.0);
    }
}

TEST_CASE("cosh pair") {
    CHECK(cosh_star(0) == 0.0);
    CHECK(cosh_primal(0) == 0.0);
    CHECK(cosh_star(2 * std::log(2.0)) == Approx(1.0).epsilon(1e-15));
    CHECK(cosh_primal(1) == Approx(0.4902876951196275).epsilon(1e-14));
    CHECK(cosh_primal(3) == Approx(3.9574767527946772).epsilon(1e-14));
    CHECK(cosh_star(1) == Approx(0.51050386082552314).epsilon(1e-14));
    // Legendre transform by 1-D maximization
    for (double s : {0.5, 1.0, 3.0}) {
        const auto best = boost::math::tools::brent_find_minima([s](double r) { return cosh_star(r) - s * r; }, -20.0,
                                                                 20.0, 50);
        CHECK(-best.second == Approx(cosh_primal(s)).epsilon(1e-8));
        CHECK(cosh_primal_derivative(s) == Approx(2 * std::asinh(s / 2)));
        CHECK(cosh_star_derivative(best.first) == Approx(s).epsilon(1e-7));
    }
    CHECK(cosh_primal(-2.0) == cosh_primal(2.0));
    CHECK(cosh_star(-2.0) == cosh_star(2.0));
}

TEST_CASE("perspective") {
    CHECK(perspective(0, 0) == 0.0);
    CHECK(perspective(1, 0) == inf);
    CHECK(perspective(-1, 0) == inf);
    CHECK(perspective(0.25, 1) == Approx(cosh_primal(0.25)));
    CHECK(perspective(3, 2) == Approx(2 * cosh_primal(1.5)).epsilon(1e-14));
    // huge ratios stay finite and close to 2|s| log(|s|/w)
    const double big = perspective(1e6, 1e-6);
    CHECK(std::isfinite(big));
    CHECK(big == Approx(2e6 * std::log(1e12) - 2e6).epsilon(1e-6));
}

TEST_CASE("dissipation potentials and slope at frozen states") {
    CHECK(primal_dissipation(sp(1), GridState::uniform(5), std::vector<double>(5, 0.0)) == 0.0);
    CHECK(dual_dissipation(sp(1), GridState::uniform(5), std::vector<double>(5, 0.0)) == 0.0);
    CHECK(slope(sp(2), GridState::uniform(5)) == 0.0);

    const auto mass_action = ActivitySpec::make(ActivityFamily::MassAction, 2.0);
    CHECK(primal_dissipation(mass_action, GridState::uniform(2), std::vector<double>{1.0, 0.0}) ==
          Approx(8 * cosh_primal(0.25)).epsilon(1e-15));
    CHECK(8 * cosh_primal(0.25) == Approx(0.24967599449157237).epsilon(1e-14));

    const GridState c({1, 2, 3, 0.7});
    struct Row {
        ActivitySpec spec;
        double slope, primal;
    };
    const Row rows[] = {{sp(0.5), 267.46423343986705, 303.69020748197439}, {rd(0.5), 270.8779078501063, 307.57891128012959},
                        {sp(1), 322.97050690475925, 366.86673476951141},   {rd(1), 339.08971649236711, 385.23631360146013},
                        {sp(2), 484.38759742645129, 550.58612179183667},   {rd(2), 572.31334222959065, 650.8555422288866},
                        {sp(4), 1374.0997367198467, 1563.5320821274611},   {rd(4), 2087.0432, 2377.2685949684444}};
    for (const auto& r : rows) {
        CAPTURE(r.spec.alpha);
        CHECK(slope(r.spec, c) == Approx(r.slope).epsilon(1e-13));
        CHECK(primal_dissipation(r.spec, c, flux(r.spec, c)) == Approx(r.primal).epsilon(1e-13));
    }

    // zero cell next to positive flux: infinite primal dissipation
    const GridState z({0, 1, 2, 1});
    const auto jz = flux(sp(2), z);
    CHECK(primal_dissipation(sp(2), z, jz) == inf);
}

TEST_CASE("constitutive relation and duality") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (double a : {0.5, 1.0, 2.0, 4.0})
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> v(12), j(12);
            for (double& x : v) x = std::exp(u(rng));
            for (double& x : j) x = 50 * u(rng);
            const GridState c(v);
            const auto xi = driving_force(c);
            // slope = R*(c, -lap log c), and the flux is the derivative of R* there
            CHECK(slope(sp(a), c) == Approx(dual_dissipation(sp(a), c, xi)).epsilon(1e-12));
            const auto jc = constitutive_flux(sp(a), c, xi);
            const auto jf = flux(sp(a), c);
            for (std::size_t k = 0; k < 12; ++k) CHECK(jc[k] == Approx(jf[k]).epsilon(1e-10).scale(1e-8));
            // Fenchel-Young: <J, xi> <= R + R*, equality on the constitutive flux
            CHECK(inner_product(j, xi) <= primal_dissipation(sp(a), c, j) + dual_dissipation(sp(a), c, xi) + 1e-9);
            const double lhs = inner_product(jc, xi);
            const double rhs = primal_dissipation(sp(a), c, jc) + dual_dissipation(sp(a), c, xi);
            CHECK(lhs == Approx(rhs).epsilon(1e-10));
        }
}

TEST_CASE("energy-dissipation functional") {
    SolverConfig config;
    config.dt = 1e-6;
    config.t_end = 1e-5;
    const Trajectory still = solve(sp(2), config, GridState::uniform(16));
    CHECK(edb_functional(sp(2), still) == 0.0);

    const auto c0 = perturbed_uniform(64, 0.5, 1);
    double previous = 0.0;
    for (double dt : {4e-6, 2e-6, 1e-6}) {
        config.dt = dt;
        config.t_end = 4e-5;
        const Trajectory tr = solve(sp(2), config, GridState(c0));
        const double l = std::abs(edb_functional(sp(2), tr));
        CHECK(l < 1e-2 * tr.diagnostics.back().cum_dissipation);
        if (previous > 0) CHECK(previous / l >= 1.9);
        previous = l;

        Trajectory doubled = tr;
        for (auto& f : doubled.fluxes)
            for (double& x : f.vector()) x *= 2.0;
        CHECK(edb_functional(sp(2), doubled) > 0.0);
    }
}

TEST_CASE("dissipation quadrature falls back to the right endpoint") {
    DissipationIntegral d;
    d.add(0.5, inf, 2.0);
    CHECK(d.value() == 1.0);
    CHECK(d.used_right_endpoint());
    d.add(1.0, 2.0, 4.0);
    CHECK(d.value() == 4.0);
}
