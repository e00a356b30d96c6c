#include "dlss/dlss.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlss/checks.hpp"
#include "dlss/continuum.hpp"
#include "dlss/error.hpp"
#include "dlss/initial.hpp"
#include "dlss/integrator.hpp"
#include "dlss/similarity.hpp"
#include "dlss/trajectory.hpp"
#include "dlss/variational.hpp"

struct dlss_activity {
    dlss::ActivitySpec spec;
    std::string family;
};

struct dlss_state {
    dlss::GridState state;
};

struct dlss_trajectory {
    dlss::Trajectory trajectory;
};

struct dlss_profile {
    dlss::ProfileSolution solution;
};

namespace {

thread_local std::string last_error;

dlss_status set_error(dlss_status status, const std::string& message) {
    last_error = message;
    return status;
}

dlss_status status_of(dlss::ErrorCode code) {
    switch (code) {
        case dlss::ErrorCode::InvalidArgument: return DLSS_ERR_INVALID_ARGUMENT;
        case dlss::ErrorCode::Domain: return DLSS_ERR_DOMAIN;
        case dlss::ErrorCode::Solver: return DLSS_ERR_SOLVER;
        case dlss::ErrorCode::Shooting: return DLSS_ERR_SHOOTING;
        case dlss::ErrorCode::Quadrature: return DLSS_ERR_QUADRATURE;
    }
    return DLSS_ERR_INTERNAL;
}

template <class F>
dlss_status guarded(F&& body) {
    try {
        last_error.clear();
        body();
        return DLSS_OK;
    } catch (const dlss::Error& e) {
        return set_error(status_of(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return set_error(DLSS_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return set_error(DLSS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(DLSS_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(DLSS_ERR_INTERNAL, "unknown exception");
    }
}

void require(bool ok, const char* what) {
    if (!ok) dlss::fail(dlss::ErrorCode::InvalidArgument, what);
}

void require_size(std::size_t have, std::size_t want, const char* what) {
    if (have != want)
        dlss::fail(dlss::ErrorCode::InvalidArgument,
                   std::string(what) + ": buffer holds " + std::to_string(have) + ", need " + std::to_string(want));
}

dlss::SolverConfig to_config(const dlss_solver_config* c) {
    dlss::SolverConfig s;
    if (!c) return s;
    s.dt = c->dt;
    s.cfl = c->cfl;
    s.t_end = c->t_end;
    s.newton_tol = c->newton_tol;
    s.newton_max_iter = c->newton_max_iter;
    s.damping = c->damping;
    s.jacobian = c->finite_difference_jacobian ? dlss::JacobianMode::FiniteDifference : dlss::JacobianMode::Analytic;
    s.record_every = c->record_every;
    s.max_halvings = c->max_halvings;
    return s;
}

dlss::ShootingOptions to_options(const dlss_shooting_options* o) {
    dlss::ShootingOptions s;
    if (!o) return s;
    s.b_lo = o->b_lo;
    s.b_hi = o->b_hi;
    s.ode_tol = o->ode_tol;
    s.event_threshold = o->event_threshold;
    s.y_max = o->y_max;
    s.b_tol = o->b_tol;
    s.max_bisections = o->max_bisections;
    s.samples = o->samples;
    return s;
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// JSON has no NaN or infinity; those become null.
nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

dlss::CheckOptions parse_check_options(const char* text) {
    dlss::CheckOptions o;
    if (!text || !*text) return o;
    const auto j = nlohmann::json::parse(text);
    require(j.is_object(), "check options: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "alphas") o.alphas = value.get<std::vector<double>>();
        else if (key == "pair_samples") o.pair_samples = value.get<std::size_t>();
        else if (key == "state_samples") o.state_samples = value.get<std::size_t>();
        else if (key == "polynomial_grid") o.polynomial_grid = value.get<std::size_t>();
        else if (key == "flux_samples") o.flux_samples = value.get<std::size_t>();
        else if (key == "commutator_n") o.commutator_n = value.get<std::vector<std::size_t>>();
        else if (key == "seed") o.seed = value.get<std::uint64_t>();
        else if (key == "tolerance") o.tolerance = value.get<double>();
        else if (key == "edb") o.edb = value.get<bool>();
        else if (key == "negative_control") o.negative_control = value.get<bool>();
        else dlss::fail(dlss::ErrorCode::InvalidArgument, "check options: unknown key '" + key + "'");
    }
    return o;
}

}  // namespace

extern "C" {

const char* dlss_version(void) { return DLSS_VERSION; }

const char* dlss_status_name(dlss_status status) {
    switch (status) {
        case DLSS_OK: return "ok";
        case DLSS_ERR_INVALID_ARGUMENT: return "invalid-argument";
        case DLSS_ERR_DOMAIN: return "domain";
        case DLSS_ERR_SOLVER: return "solver";
        case DLSS_ERR_SHOOTING: return "shooting";
        case DLSS_ERR_QUADRATURE: return "quadrature";
        case DLSS_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* dlss_last_error(void) { return last_error.c_str(); }

void dlss_string_free(char* s) { std::free(s); }

dlss_status dlss_activity_create(const char* family, double alpha, double epsilon_diag, dlss_activity** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(family && out, "activity_create: null argument");
        const auto f = dlss::parse_family(family);
        require(f != dlss::ActivityFamily::Constant, "activity_create: use dlss_activity_constant");
        *out = new dlss_activity{dlss::ActivitySpec::make(f, alpha, epsilon_diag), family};
    });
}

dlss_status dlss_activity_constant(double value, double alpha, dlss_activity** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(out, "activity_constant: null argument");
        *out = new dlss_activity{dlss::ActivitySpec::constant_value(value, alpha), "constant"};
    });
}

void dlss_activity_destroy(dlss_activity* a) { delete a; }

double dlss_activity_alpha(const dlss_activity* a) { return a ? a->spec.alpha : NAN; }

const char* dlss_activity_family(const dlss_activity* a) { return a ? a->family.c_str() : ""; }

dlss_status dlss_activity_eval(const dlss_activity* a, double x, double y, double* sigma, double* jbar,
                               double* mobility) {
    return guarded([&] {
        require(a, "activity_eval: null activity");
        if (sigma) *sigma = dlss::activity(a->spec, x, y);
        if (jbar) *jbar = dlss::jbar(a->spec, x, y);
        if (mobility) *mobility = dlss::mobility(a->spec, x, y);
    });
}

dlss_status dlss_state_create(const double* values, size_t n, dlss_state** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(values && out, "state_create: null argument");
        *out = new dlss_state{dlss::GridState(std::vector<double>(values, values + n))};
    });
}

dlss_status dlss_state_uniform(size_t n, dlss_state** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(out, "state_uniform: null argument");
        *out = new dlss_state{dlss::GridState::uniform(n)};
    });
}

dlss_status dlss_state_bump(size_t n, double ell, int normalize, dlss_state** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(out, "state_bump: null argument");
        *out = new dlss_state{dlss::GridState(dlss::bump_profile(n, ell, normalize != 0))};
    });
}

dlss_status dlss_state_perturbed_uniform(size_t n, double amplitude, int mode, dlss_state** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(out, "state_perturbed_uniform: null argument");
        *out = new dlss_state{dlss::GridState(dlss::perturbed_uniform(n, amplitude, mode))};
    });
}

void dlss_state_destroy(dlss_state* s) { delete s; }

size_t dlss_state_size(const dlss_state* s) { return s ? s->state.size() : 0; }

dlss_status dlss_state_values(const dlss_state* s, double* out, size_t n) {
    return guarded([&] {
        require(s && out, "state_values: null argument");
        require_size(n, s->state.size(), "state_values");
        std::copy(s->state.vector().begin(), s->state.vector().end(), out);
    });
}

dlss_status dlss_entropy(const dlss_state* c, double* out) {
    return guarded([&] {
        require(c && out, "entropy: null argument");
        *out = dlss::entropy(c->state);
    });
}

dlss_status dlss_flux(const dlss_activity* a, const dlss_state* c, double* out, size_t n) {
    return guarded([&] {
        require(a && c && out, "flux: null argument");
        require_size(n, c->state.size(), "flux");
        const auto j = dlss::flux(a->spec, c->state);
        std::copy(j.vector().begin(), j.vector().end(), out);
    });
}

dlss_status dlss_slope(const dlss_activity* a, const dlss_state* c, double* out) {
    return guarded([&] {
        require(a && c && out, "slope: null argument");
        *out = dlss::slope(a->spec, c->state);
    });
}

dlss_status dlss_primal_dissipation(const dlss_activity* a, const dlss_state* c, const double* j, size_t n,
                                    double* out) {
    return guarded([&] {
        require(a && c && j && out, "primal_dissipation: null argument");
        require_size(n, c->state.size(), "primal_dissipation");
        *out = dlss::primal_dissipation(a->spec, c->state, std::span<const double>(j, n));
    });
}

dlss_status dlss_dual_dissipation(const dlss_activity* a, const dlss_state* c, const double* xi, size_t n,
                                  double* out) {
    return guarded([&] {
        require(a && c && xi && out, "dual_dissipation: null argument");
        require_size(n, c->state.size(), "dual_dissipation");
        *out = dlss::dual_dissipation(a->spec, c->state, std::span<const double>(xi, n));
    });
}

void dlss_solver_config_default(dlss_solver_config* config) {
    if (!config) return;
    const dlss::SolverConfig s;
    config->dt = s.dt;
    config->cfl = s.cfl;
    config->t_end = s.t_end;
    config->newton_tol = s.newton_tol;
    config->newton_max_iter = s.newton_max_iter;
    config->damping = s.damping;
    config->finite_difference_jacobian = s.jacobian == dlss::JacobianMode::FiniteDifference;
    config->record_every = s.record_every;
    config->max_halvings = s.max_halvings;
}

dlss_status dlss_solve(const dlss_activity* a, const dlss_solver_config* config, const dlss_state* c0,
                       dlss_trajectory** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(a && config && c0 && out, "solve: null argument");
        *out = new dlss_trajectory{dlss::solve(a->spec, to_config(config), c0->state)};
    });
}

void dlss_trajectory_destroy(dlss_trajectory* t) { delete t; }

size_t dlss_trajectory_length(const dlss_trajectory* t) { return t ? t->trajectory.states.size() : 0; }

size_t dlss_trajectory_grid_size(const dlss_trajectory* t) {
    return t && !t->trajectory.states.empty() ? t->trajectory.states.front().size() : 0;
}

dlss_status dlss_trajectory_snapshot(const dlss_trajectory* t, size_t index, double* time, double* c, double* j,
                                     size_t n) {
    return guarded([&] {
        require(t, "trajectory_snapshot: null trajectory");
        const auto& tr = t->trajectory;
        require(index < tr.states.size(), "trajectory_snapshot: index out of range");
        if (time) *time = tr.times[index];
        if (c) {
            require_size(n, tr.states[index].size(), "trajectory_snapshot");
            std::copy(tr.states[index].vector().begin(), tr.states[index].vector().end(), c);
        }
        if (j) {
            require_size(n, tr.fluxes[index].size(), "trajectory_snapshot");
            std::copy(tr.fluxes[index].vector().begin(), tr.fluxes[index].vector().end(), j);
        }
    });
}

dlss_status dlss_trajectory_diagnostics(const dlss_trajectory* t, size_t index, dlss_diagnostics* out) {
    return guarded([&] {
        require(t && out, "trajectory_diagnostics: null argument");
        require(index < t->trajectory.diagnostics.size(), "trajectory_diagnostics: index out of range");
        const auto& d = t->trajectory.diagnostics[index];
        *out = {d.t, d.energy, d.primal, d.slope, d.mass, d.min_density, d.cum_dissipation, d.edb_residual};
    });
}

dlss_status dlss_trajectory_stats(const dlss_trajectory* t, dlss_run_stats* out) {
    return guarded([&] {
        require(t && out, "trajectory_stats: null argument");
        const auto& s = t->trajectory.stats;
        *out = {s.steps,
                s.substeps,
                s.newton_iterations,
                s.halvings,
                s.max_residual,
                s.max_mass_drift,
                s.min_density_positive_t,
                s.max_entropy_increase,
                t->trajectory.right_endpoint_start ? 1 : 0};
    });
}

dlss_status dlss_edb_functional(const dlss_activity* a, const dlss_trajectory* t, double* out) {
    return guarded([&] {
        require(a && t && out, "edb_functional: null argument");
        *out = dlss::edb_functional(a->spec, t->trajectory);
    });
}

dlss_status dlss_edb_study(const dlss_activity* a, const dlss_state* c0, double t_end, double dt0, int halvings,
                           const dlss_solver_config* base, dlss_edb_row* rows) {
    return guarded([&] {
        require(a && c0 && rows, "edb_study: null argument");
        const auto study = dlss::edb_study(a->spec, c0->state.vector(), t_end, dt0, halvings, to_config(base));
        for (std::size_t i = 0; i < study.size(); ++i)
            rows[i] = {study[i].dt, study[i].residual, study[i].order, study[i].steps};
    });
}

dlss_status dlss_wave_parameters(double alpha, double kappa, double* delta, double* speed) {
    return guarded([&] {
        const auto w = dlss::TravelingWave::make(alpha, kappa);
        if (delta) *delta = w.delta;
        if (speed) *speed = w.speed;
    });
}

dlss_status dlss_wave_eval(double alpha, double kappa, double t, double x, double* out) {
    return guarded([&] {
        require(out, "wave_eval: null argument");
        *out = dlss::TravelingWave::make(alpha, kappa)(t, x);
    });
}

dlss_status dlss_wave_residual(double alpha, double kappa, double t, double margin, double width, size_t points,
                               const double* h, size_t nh, dlss_wave_row* rows) {
    return guarded([&] {
        require(h && rows && nh > 0, "wave_residual: null argument");
        dlss::WaveResidualOptions o;
        o.t = t;
        o.margin = margin;
        o.width = width;
        o.points = points;
        o.h_ladder.assign(h, h + nh);
        const auto r = dlss::wave_residual(dlss::TravelingWave::make(alpha, kappa), o);
        for (std::size_t i = 0; i < r.size(); ++i) rows[i] = {r[i].h, r[i].residual, r[i].relative, r[i].order};
    });
}

void dlss_shooting_options_default(dlss_shooting_options* options) {
    if (!options) return;
    const dlss::ShootingOptions s;
    *options = {s.b_lo, s.b_hi, s.ode_tol, s.event_threshold, s.y_max, s.b_tol, s.max_bisections, s.samples};
}

dlss_status dlss_shoot_profile(double alpha, const dlss_shooting_options* options, dlss_profile** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(out, "shoot_profile: null argument");
        *out = new dlss_profile{dlss::shoot_profile(alpha, to_options(options))};
    });
}

void dlss_profile_destroy(dlss_profile* p) { delete p; }

dlss_status dlss_profile_info_get(const dlss_profile* p, dlss_profile_info* out) {
    return guarded([&] {
        require(p && out, "profile_info_get: null argument");
        const auto& s = p->solution;
        *out = {s.alpha,          s.gamma,         s.b_star,         s.b_uncertainty,
                s.bisections,     s.y_end,         dlss::tail_kind_name(s.tail),
                s.tail_exponent,  s.tail_stderr,   s.tail_curvature, s.support_radius,
                s.fit_phi_lo,     s.fit_phi_hi,    s.fit_points,     s.y.size()};
    });
}

dlss_status dlss_profile_samples(const dlss_profile* p, double* y, double* phi, size_t n) {
    return guarded([&] {
        require(p, "profile_samples: null profile");
        require_size(n, p->solution.y.size(), "profile_samples");
        if (y) std::copy(p->solution.y.begin(), p->solution.y.end(), y);
        if (phi) std::copy(p->solution.phi.begin(), p->solution.phi.end(), phi);
    });
}

double dlss_similarity_gamma(double alpha) { return dlss::similarity_gamma(alpha); }

dlss_status dlss_flux_embedding_l1(const double* j, size_t n, double* l1, double* dropped_mean) {
    return guarded([&] {
        require(j, "flux_embedding_l1: null flux");
        const auto e = dlss::embed_flux(std::span<const double>(j, n));
        if (l1) *l1 = e.l1_norm();
        if (dropped_mean) *dropped_mean = e.dropped_mean();
    });
}

dlss_status dlss_commutator_defect_sine(size_t n, double* out) {
    return guarded([&] {
        require(out, "commutator_defect_sine: null argument");
        const double w = 2.0 * std::numbers::pi;
        *out = dlss::commutator_defect([w](double x) { return std::sin(w * x); },
                                       [w](double x) { return -w * w * std::sin(w * x); }, n);
    });
}

dlss_status dlss_continuous_entropy(const dlss_state* c, double* out) {
    return guarded([&] {
        require(c && out, "continuous_entropy: null argument");
        *out = dlss::continuous_entropy(dlss::embed_density(c->state));
    });
}

dlss_status dlss_refinement_sine(const dlss_activity* a, double mean, double amplitude, int mode, double t_end,
                                 double dt, const dlss_solver_config* base, const size_t* n_list, size_t count,
                                 dlss_refinement_row* rows) {
    return guarded([&] {
        require(a && n_list && rows && count > 0, "refinement_sine: null argument");
        dlss::RefinementProblem p;
        p.initial = dlss::sine_density(mean, amplitude, mode);
        p.t_end = t_end;
        p.dt = dt;
        p.solver = to_config(base);
        const auto r = dlss::refinement_study(a->spec, p, std::span<const std::size_t>(n_list, count));
        for (std::size_t i = 0; i < r.size(); ++i)
            rows[i] = {r[i].n,
                       r[i].energy_discrete,
                       r[i].energy_embedded,
                       r[i].dissipation_discrete,
                       r[i].dissipation_embedded,
                       r[i].l1_to_next,
                       r[i].order,
                       r[i].steps};
    });
}

dlss_status dlss_run_checks(const char* options_json, char** report_json, int* all_passed) {
    if (report_json) *report_json = nullptr;
    return guarded([&] {
        require(report_json, "run_checks: null report pointer");
        const auto results = dlss::run_checks(parse_check_options(options_json));
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& r : results)
            checks.push_back({{"group", r.group},
                              {"name", r.name},
                              {"passed", r.passed},
                              {"measured", number(r.measured)},
                              {"bound", number(r.bound)},
                              {"samples", r.samples},
                              {"violations", r.violations},
                              {"detail", r.detail}});
        const bool ok = dlss::all_passed(results);
        const nlohmann::json report{{"version", DLSS_VERSION}, {"all_passed", ok}, {"checks", std::move(checks)}};
        *report_json = copy_string(report.dump(2));
        if (all_passed) *all_passed = ok ? 1 : 0;
    });
}

}  // extern "C"
