#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dlss/error.hpp"
#include "dlss/similarity.hpp"

using namespace dlss;
using doctest::Approx;

TEST_CASE("traveling front parameters") {
    const auto w2 = TravelingWave::make(2.0, 1.0);
    CHECK(w2.delta == 3.0);
    CHECK(w2.speed == 12.0);
    CHECK(w2(1.0, 0.0) == Approx(1728.0).epsilon(1e-15));
    CHECK(w2(1.0, 12.5) == 0.0);
    CHECK(w2(1.0, 12.0) == 0.0);

    const auto w4 = TravelingWave::make(4.0, 1.0);
    CHECK(w4.delta == 1.0);
    CHECK(w4.speed == Approx(2.0));

    CHECK(TravelingWave::make(1.5, 2.0).speed == Approx(std::pow(2.0, 0.5) * 3 * 3.5 / 0.25));
    CHECK(TravelingWave::make(1.5, 1.0).classical());
    CHECK_FALSE(w2.classical());
    CHECK_THROWS_AS(TravelingWave::make(1.0, 1.0), Error);
    CHECK_THROWS_AS(TravelingWave::make(2.0, 0.0), Error);
}

TEST_CASE("front residual is fourth order in the difference step") {
    const auto rows = wave_residual(TravelingWave::make(1.5, 1.0));
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].order == Approx(4.0).epsilon(0.05));
    CHECK(rows.back().relative < 1e-8);

    WaveResidualOptions o;
    o.margin = 0.5;
    const auto r3 = wave_residual(TravelingWave::make(3.0, 1.0), o);
    CHECK(r3.back().order == Approx(4.0).epsilon(0.1));

    // alpha = 2: rho is a cubic in x, so the PDE holds up to rounding
    const auto r2 = wave_residual(TravelingWave::make(2.0, 1.0));
    for (const auto& r : r2) CHECK(r.relative < 1e-9);
}

TEST_CASE("profile ODE") {
    CHECK(similarity_gamma(1.0) == 0.25);
    // Gaussian solves the alpha = 1 equation
    for (double y : {0.0, 0.5, 1.3, 2.9}) {
        const double p = std::exp(-y * y / 4);
        const double d1 = -y / 2 * p, d2 = (y * y / 4 - 0.5) * p, d3 = (0.75 * y - y * y * y / 8) * p;
        CHECK(std::abs(profile_residual(1.0, y, p, d1, d2, d3)) <= 1e-14);
        if (y > 0) {
            const auto r = profile_ode_rhs(1.0, y, {p, d1, d2});
            CHECK(r[2] == Approx(d3).epsilon(1e-12));
        }
    }
    // at y = 0 with Phi' = 0 the flux derivative vanishes for any alpha
    for (double a : {0.5, 2.0, 4.0}) CHECK(profile_residual(a, 0.0, 1.0, 0.0, -0.3, 0.0) == 0.0);
    CHECK_THROWS_AS(profile_ode_rhs(1.0, 1.0, {0.0, 0.0, 0.0}), Error);
}

TEST_CASE("tail fits on synthetic data") {
    std::vector<double> y, phi;
    for (int i = 0; i <= 400; ++i) {
        y.push_back(5.0 + 45.0 * i / 400);
        phi.push_back(std::pow(y.back(), -6.0));
    }
    const auto a = fit_algebraic_tail(y, phi, 1e-11, 1.0);
    CHECK(a.exponent == Approx(6.0).epsilon(1e-10));

    y.clear();
    phi.clear();
    for (int i = 0; i <= 400; ++i) {
        y.push_back(0.9 + 0.0999 * i / 400);
        phi.push_back(std::pow(1.0 - y.back(), 3.0));
    }
    double radius = 0.0;
    const auto s = fit_support_tail(y, phi, 1e-12, 1e-3, radius);
    CHECK(s.exponent == Approx(3.0).epsilon(0.02 / 3));
    CHECK(radius == Approx(1.0).epsilon(1e-6));

    std::vector<double> few{1, 2, 3}, fewp{1e-4, 1e-5, 1e-6};
    CHECK_THROWS_AS(fit_algebraic_tail(few, fewp, 1e-7, 1e-3), Error);
}

TEST_CASE("shooting") {
    const auto g = shoot_profile(1.0);
    CHECK(g.b_star == Approx(-0.5).epsilon(1e-6));
    CHECK(g.tail == TailKind::None);
    double err = 0.0;
    for (std::size_t i = 0; i < g.y.size() && g.y[i] <= 4.0; ++i)
        err = std::max(err, std::abs(g.phi[i] - std::exp(-g.y[i] * g.y[i] / 4)));
    CHECK(err <= 1e-6);
    // a Gaussian is not a power law: the log-log fit bends
    std::vector<double> y, p;
    for (std::size_t i = 0; i < g.y.size(); ++i)
        if (g.y[i] > 1.0) y.push_back(g.y[i]), p.push_back(g.phi[i]);
    CHECK(std::abs(fit_algebraic_tail(y, p, 1e-7, 1e-2).curvature) > 1.0);

    const auto s = shoot_profile(2.0);
    CHECK(s.tail == TailKind::Support);
    CHECK(s.tail_exponent == Approx(3.0).epsilon(0.1 / 3));
    CHECK(s.support_radius > s.y_end);
    CHECK(s.b_star == Approx(-0.398270540497).epsilon(1e-9));

    ShootingOptions bad;
    bad.b_lo = -0.1;
    CHECK_THROWS_AS(shoot_profile(2.0, bad), Error);
    CHECK_THROWS_AS(shoot_profile(-3.0), Error);
}
