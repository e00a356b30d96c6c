#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <json.hpp>
#include <string>
#include <vector>

#include "dlss/dlss.h"

using doctest::Approx;

TEST_CASE("activity handles") {
    dlss_activity* a = nullptr;
    REQUIRE(dlss_activity_create("stolarsky-power", 2.0, 1e-7, &a) == DLSS_OK);
    CHECK(dlss_activity_alpha(a) == 2.0);
    CHECK(std::string(dlss_activity_family(a)) == "stolarsky-power");
    double s = 0, j = 0, m = 0;
    REQUIRE(dlss_activity_eval(a, 1.0, 1.0, &s, &j, &m) == DLSS_OK);
    CHECK(s == Approx(1.0));
    CHECK(j == 0.0);
    CHECK(m == Approx(1.0));
    CHECK(dlss_activity_eval(a, 2.0, 1.0, nullptr, nullptr, nullptr) == DLSS_OK);
    dlss_activity_destroy(a);
    dlss_activity_destroy(nullptr);

    dlss_activity* bad = reinterpret_cast<dlss_activity*>(0x1);
    CHECK(dlss_activity_create("nope", 1.0, 1e-7, &bad) == DLSS_ERR_INVALID_ARGUMENT);
    CHECK(bad == nullptr);
    CHECK(std::strlen(dlss_last_error()) > 0);
    CHECK(dlss_activity_create("mrss", 2.0, 1e-7, &bad) == DLSS_ERR_INVALID_ARGUMENT);
    CHECK(dlss_activity_create("stolarsky-power", -1.0, 1e-7, &bad) == DLSS_ERR_INVALID_ARGUMENT);
    CHECK(dlss_activity_create(nullptr, 1.0, 1e-7, &bad) == DLSS_ERR_INVALID_ARGUMENT);
    CHECK(dlss_activity_create("mrss", 1.0, 1e-7, nullptr) == DLSS_ERR_INVALID_ARGUMENT);
    CHECK(std::string(dlss_status_name(DLSS_ERR_SHOOTING)) == "shooting");
    CHECK(std::string(dlss_version()).size() > 0);
}

TEST_CASE("states and grid functionals") {
    dlss_state* c = nullptr;
    const double v[4] = {1, 2, 3, 0.7};
    REQUIRE(dlss_state_create(v, 4, &c) == DLSS_OK);
    CHECK(dlss_state_size(c) == 4);
    double back[4];
    REQUIRE(dlss_state_values(c, back, 4) == DLSS_OK);
    CHECK(back[3] == 0.7);
    CHECK(dlss_state_values(c, back, 3) == DLSS_ERR_INVALID_ARGUMENT);

    double e = 0;
    REQUIRE(dlss_entropy(c, &e) == DLSS_OK);
    CHECK(e == Approx(0.43311469159177676).epsilon(1e-14));
    double ce = 0;
    REQUIRE(dlss_continuous_entropy(c, &ce) == DLSS_OK);
    CHECK(ce == e);

    dlss_activity* a = nullptr;
    REQUIRE(dlss_activity_create("stolarsky-power", 2.0, 1e-7, &a) == DLSS_OK);
    double j[4];
    REQUIRE(dlss_flux(a, c, j, 4) == DLSS_OK);
    CHECK(j[1] == Approx(15.917946548886296).epsilon(1e-13));
    double sl = 0;
    REQUIRE(dlss_slope(a, c, &sl) == DLSS_OK);
    CHECK(sl == Approx(484.38759742645129).epsilon(1e-12));
    double r = 0;
    REQUIRE(dlss_primal_dissipation(a, c, j, 4, &r) == DLSS_OK);
    CHECK(r > 0);
    double xi[4] = {0, 0, 0, 0}, rs = 1;
    REQUIRE(dlss_dual_dissipation(a, c, xi, 4, &rs) == DLSS_OK);
    CHECK(rs == 0.0);
    CHECK(dlss_flux(a, c, j, 5) == DLSS_ERR_INVALID_ARGUMENT);

    const double neg[3] = {1, -1, 1};
    dlss_state* bad = nullptr;
    CHECK(dlss_state_create(neg, 3, &bad) != DLSS_OK);
    CHECK(bad == nullptr);

    dlss_state* b = nullptr;
    REQUIRE(dlss_state_bump(64, 0.1, 1, &b) == DLSS_OK);
    std::vector<double> bv(64);
    REQUIRE(dlss_state_values(b, bv.data(), 64) == DLSS_OK);
    double sum = 0;
    for (double x : bv) sum += x;
    CHECK(sum / 64 == Approx(1.0));
    dlss_state_destroy(b);
    dlss_state_destroy(c);
    dlss_activity_destroy(a);
}

TEST_CASE("solve through the C interface") {
    dlss_activity* a = nullptr;
    REQUIRE(dlss_activity_create("stolarsky-power", 1.0, 1e-7, &a) == DLSS_OK);
    dlss_state* c = nullptr;
    REQUIRE(dlss_state_perturbed_uniform(32, 0.5, 1, &c) == DLSS_OK);
    dlss_solver_config cfg;
    dlss_solver_config_default(&cfg);
    cfg.dt = 1e-6;
    cfg.t_end = 1e-5;
    dlss_trajectory* t = nullptr;
    REQUIRE(dlss_solve(a, &cfg, c, &t) == DLSS_OK);
    CHECK(dlss_trajectory_length(t) == 11);
    CHECK(dlss_trajectory_grid_size(t) == 32);
    double time = 0;
    std::vector<double> cs(32), js(32);
    REQUIRE(dlss_trajectory_snapshot(t, 10, &time, cs.data(), js.data(), 32) == DLSS_OK);
    CHECK(time == Approx(1e-5));
    CHECK(dlss_trajectory_snapshot(t, 11, &time, nullptr, nullptr, 0) == DLSS_ERR_INVALID_ARGUMENT);
    dlss_diagnostics d0, d1;
    REQUIRE(dlss_trajectory_diagnostics(t, 0, &d0) == DLSS_OK);
    REQUIRE(dlss_trajectory_diagnostics(t, 10, &d1) == DLSS_OK);
    CHECK(d1.energy < d0.energy);
    CHECK(d1.mass == Approx(d0.mass).epsilon(1e-13));
    dlss_run_stats st;
    REQUIRE(dlss_trajectory_stats(t, &st) == DLSS_OK);
    CHECK(st.steps == 10);
    CHECK(st.max_mass_drift <= 1e-12);
    CHECK(st.max_entropy_increase <= 1e-10);
    double l = 0;
    REQUIRE(dlss_edb_functional(a, t, &l) == DLSS_OK);
    CHECK(std::abs(l) < 1e-2 * (d0.energy - d1.energy));
    dlss_trajectory_destroy(t);

    dlss_edb_row rows[3];
    REQUIRE(dlss_edb_study(a, c, 1e-5, 1e-6, 2, &cfg, rows) == DLSS_OK);
    CHECK(rows[2].order == Approx(1.0).epsilon(0.15));

    cfg.damping = 2.0;
    CHECK(dlss_solve(a, &cfg, c, &t) == DLSS_ERR_INVALID_ARGUMENT);
    CHECK(t == nullptr);
    dlss_state_destroy(c);
    dlss_activity_destroy(a);
}

TEST_CASE("fronts, profiles, continuum") {
    double delta = 0, speed = 0;
    REQUIRE(dlss_wave_parameters(2.0, 1.0, &delta, &speed) == DLSS_OK);
    CHECK(delta == 3.0);
    CHECK(speed == 12.0);
    double v = 0;
    REQUIRE(dlss_wave_eval(2.0, 1.0, 1.0, 0.0, &v) == DLSS_OK);
    CHECK(v == Approx(1728.0));
    CHECK(dlss_wave_parameters(0.5, 1.0, &delta, &speed) == DLSS_ERR_INVALID_ARGUMENT);
    const double h[3] = {4e-2, 2e-2, 1e-2};
    dlss_wave_row wr[3];
    REQUIRE(dlss_wave_residual(1.5, 1.0, 1.0, 0.25, 1.0, 64, h, 3, wr) == DLSS_OK);
    CHECK(wr[2].order == Approx(4.0).epsilon(0.05));

    CHECK(dlss_similarity_gamma(1.0) == 0.25);
    dlss_shooting_options so;
    dlss_shooting_options_default(&so);
    dlss_profile* p = nullptr;
    REQUIRE(dlss_shoot_profile(1.0, &so, &p) == DLSS_OK);
    dlss_profile_info info;
    REQUIRE(dlss_profile_info_get(p, &info) == DLSS_OK);
    CHECK(info.b_star == Approx(-0.5).epsilon(1e-6));
    CHECK(std::string(info.tail) == "none");
    std::vector<double> y(info.samples), phi(info.samples);
    REQUIRE(dlss_profile_samples(p, y.data(), phi.data(), y.size()) == DLSS_OK);
    CHECK(phi[0] == 1.0);
    dlss_profile_destroy(p);
    so.b_lo = -0.1;
    CHECK(dlss_shoot_profile(2.0, &so, &p) == DLSS_ERR_SHOOTING);

    const double j[4] = {1, -1, 2, 0};
    double l1 = 0, mean = 0;
    REQUIRE(dlss_flux_embedding_l1(j, 4, &l1, &mean) == DLSS_OK);
    CHECK(mean == 0.5);
    CHECK(l1 <= 2.0 * 4.0 / 4);
    double d = 0;
    REQUIRE(dlss_commutator_defect_sine(64, &d) == DLSS_OK);
    CHECK(d <= std::pow(2 * M_PI, 3) / (3 * 64));

    dlss_activity* a = nullptr;
    REQUIRE(dlss_activity_create("stolarsky-power", 1.0, 1e-7, &a) == DLSS_OK);
    dlss_solver_config cfg;
    dlss_solver_config_default(&cfg);
    const size_t ns[3] = {32, 64, 128};
    dlss_refinement_row rr[3];
    REQUIRE(dlss_refinement_sine(a, 1.0, 0.5, 1, 1e-5, 1e-6, &cfg, ns, 3, rr) == DLSS_OK);
    CHECK(rr[1].order >= 1.8);
    CHECK(rr[0].energy_discrete == rr[0].energy_embedded);
    dlss_activity_destroy(a);
}

TEST_CASE("property report as JSON") {
    char* report = nullptr;
    int ok = 0;
    const char* opts = R"({"alphas":[1.0],"pair_samples":2000,"state_samples":50,"polynomial_grid":100,
                           "flux_samples":20,"commutator_n":[16,32],"edb":false})";
    REQUIRE(dlss_run_checks(opts, &report, &ok) == DLSS_OK);
    CHECK(ok == 1);
    const auto j = nlohmann::json::parse(report);
    dlss_string_free(report);
    CHECK(j["all_passed"] == true);
    CHECK(j["checks"].size() > 10);
    for (const auto& c : j["checks"]) {
        CHECK(c.contains("group"));
        CHECK(c.contains("measured"));
    }
    CHECK(dlss_run_checks(R"({"bogus":1})", &report, &ok) == DLSS_ERR_INVALID_ARGUMENT);
    CHECK(dlss_run_checks("{not json", &report, &ok) == DLSS_ERR_INVALID_ARGUMENT);
    CHECK(report == nullptr);
}
