// dlss: command-line driver over the C interface of libdlss.
//
//   dlss solve     --config run.json [--alpha 2 --n 1024 --initial bump ...]
//   dlss profile   --alpha 0.5 --alpha 1 --alpha 2
//   dlss wave-check --alpha 1.5
//   dlss check     [--quick]
//   dlss converge  --alpha 1 --n 64 --n 128 --n 256 --n 512
//
// Exit codes: 0 ok, 1 failed property checks, 2 configuration, 3 solver, 4 shooting.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlss/dlss.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitChecks = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitShooting = 4;

struct Failure {
    int exit_code;
    std::string message;
};

[[noreturn]] void config_error(const std::string& what) { throw Failure{kExitConfig, what}; }

int exit_code_for(dlss_status s) {
    switch (s) {
        case DLSS_ERR_INVALID_ARGUMENT: return kExitConfig;
        case DLSS_ERR_SHOOTING: return kExitShooting;
        default: return kExitSolver;
    }
}

void check(dlss_status s, const std::string& context) {
    if (s != DLSS_OK)
        throw Failure{exit_code_for(s), context + ": " + dlss_status_name(s) + ": " + dlss_last_error()};
}

// Owning wrappers so that early exits release library handles.
template <class T, void (*Destroy)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Destroy(p); }
    T** out() { return &p; }
    T* get() const { return p; }
};
using Activity = Handle<dlss_activity, dlss_activity_destroy>;
using State = Handle<dlss_state, dlss_state_destroy>;
using Run = Handle<dlss_trajectory, dlss_trajectory_destroy>;
using Profile = Handle<dlss_profile, dlss_profile_destroy>;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---- configuration ----

json default_config() {
    dlss_solver_config s;
    dlss_solver_config_default(&s);
    dlss_shooting_options o;
    dlss_shooting_options_default(&o);
    return {
        {"seed", 20240611},
        {"grid", {{"n", 256}}},
        {"activity", {{"family", "stolarsky-power"}, {"alpha", 1.0}, {"epsilon_diag", 1e-7}}},
        {"solver",
         {{"dt", s.dt},
          {"cfl", s.cfl},
          {"t_end", 1e-6},
          {"newton_tol", s.newton_tol},
          {"newton_max_iter", s.newton_max_iter},
          {"damping", s.damping},
          {"jacobian", "analytic"},
          {"max_halvings", s.max_halvings}}},
        {"initial",
         {{"preset", "perturbed-uniform"},
          {"ell", 0.1},
          {"normalize", true},
          {"amplitude", 0.5},
          {"mode", 1},
          {"path", nullptr}}},
        {"output", {{"dir", "dlss-out"}, {"formats", {"csv"}}, {"record_every", 1}}},
        {"sweep", {{"alpha", json::array()}, {"n", json::array()}, {"dt", json::array()}, {"workers", 0}}},
        {"profile",
         {{"alphas", {1.0}},
          {"b_lo", o.b_lo},
          {"b_hi", o.b_hi},
          {"ode_tol", o.ode_tol},
          {"event_threshold", o.event_threshold},
          {"y_max", o.y_max},
          {"b_tol", o.b_tol},
          {"max_bisections", o.max_bisections},
          {"samples", o.samples}}},
        {"wave",
         {{"alpha", 1.5},
          {"kappa", 1.0},
          {"t", 1.0},
          {"margin", 0.25},
          {"width", 1.0},
          {"points", 64},
          {"h", {4e-2, 2e-2, 1e-2, 5e-3}}}},
        {"check", json::object()},
        {"converge",
         {{"n", {64, 128, 256, 512}}, {"mean", 1.0}, {"amplitude", 0.5}, {"mode", 1}, {"t_end", 1e-4}, {"dt", 1e-6}}},
    };
}

// Every key in the file must exist in the defaults; "check" is passed through to the library.
void validate_keys(const json& given, const json& reference, const std::string& path) {
    if (!given.is_object()) config_error("config: '" + path + "' must be an object");
    for (const auto& [key, value] : given.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!reference.contains(key)) config_error("config: unknown key '" + here + "'");
        const json& ref = reference.at(key);
        if (ref.is_object() && here != "check") validate_keys(value, ref, here);
    }
}

json load_config(const std::string& path) {
    json config = default_config();
    if (path.empty()) return config;
    std::ifstream in(path);
    if (!in) config_error("config: cannot open '" + path + "'");
    json file;
    try {
        file = json::parse(in);
    } catch (const json::exception& e) {
        config_error("config: " + path + ": " + e.what());
    }
    validate_keys(file, config, "");
    config.merge_patch(file);
    return config;
}

template <class T>
T get(const json& config, const json::json_pointer& p) {
    try {
        return config.at(p).get<T>();
    } catch (const json::exception& e) {
        config_error("config: " + p.to_string() + ": " + e.what());
    }
}

template <class T>
void override(json& config, const char* pointer, const std::optional<T>& value) {
    if (value) config[json::json_pointer(pointer)] = *value;
}

template <class T>
void override(json& config, const char* pointer, const std::vector<T>& values) {
    if (!values.empty()) config[json::json_pointer(pointer)] = values;
}

dlss_solver_config solver_config(const json& c) {
    dlss_solver_config s;
    dlss_solver_config_default(&s);
    s.dt = get<double>(c, "/solver/dt"_json_pointer);
    s.cfl = get<double>(c, "/solver/cfl"_json_pointer);
    s.t_end = get<double>(c, "/solver/t_end"_json_pointer);
    s.newton_tol = get<double>(c, "/solver/newton_tol"_json_pointer);
    s.newton_max_iter = get<int>(c, "/solver/newton_max_iter"_json_pointer);
    s.damping = get<double>(c, "/solver/damping"_json_pointer);
    s.max_halvings = get<int>(c, "/solver/max_halvings"_json_pointer);
    s.record_every = get<int>(c, "/output/record_every"_json_pointer);
    const auto jac = get<std::string>(c, "/solver/jacobian"_json_pointer);
    if (jac != "analytic" && jac != "finite-difference")
        config_error("config: solver.jacobian must be 'analytic' or 'finite-difference'");
    s.finite_difference_jacobian = jac == "finite-difference";
    return s;
}

void make_activity(const json& c, double alpha, Activity& a) {
    check(dlss_activity_create(get<std::string>(c, "/activity/family"_json_pointer).c_str(), alpha,
                                get<double>(c, "/activity/epsilon_diag"_json_pointer), a.out()),
          "activity");
}

std::vector<double> read_density_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("initial: cannot open '" + path + "'");
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        // the last comma-separated field is the density; a non-numeric first row is a header
        const auto comma = line.rfind(',');
        const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
        char* end = nullptr;
        const double v = std::strtod(field.c_str(), &end);
        if (end == field.c_str()) {
            if (values.empty()) continue;
            config_error("initial: bad value '" + field + "' in " + path);
        }
        values.push_back(v);
    }
    if (values.empty()) config_error("initial: no values in " + path);
    return values;
}

void make_initial(const json& c, std::size_t n, State& s) {
    const auto preset = get<std::string>(c, "/initial/preset"_json_pointer);
    if (preset == "uniform") {
        check(dlss_state_uniform(n, s.out()), "initial");
    } else if (preset == "bump") {
        check(dlss_state_bump(n, get<double>(c, "/initial/ell"_json_pointer),
                              get<bool>(c, "/initial/normalize"_json_pointer), s.out()),
              "initial");
    } else if (preset == "perturbed-uniform") {
        check(dlss_state_perturbed_uniform(n, get<double>(c, "/initial/amplitude"_json_pointer),
                                           get<int>(c, "/initial/mode"_json_pointer), s.out()),
              "initial");
    } else if (preset == "custom-csv") {
        if (c.at("/initial/path"_json_pointer).is_null()) config_error("initial: custom-csv needs initial.path");
        const auto v = read_density_csv(get<std::string>(c, "/initial/path"_json_pointer));
        check(dlss_state_create(v.data(), v.size(), s.out()), "initial");
    } else {
        config_error("initial: unknown preset '" + preset + "'");
    }
}

const char* provenance(const std::string& family) {
    if (family == "stolarsky-power") return "Stolarsky-mean construction; admissibility proven";
    if (family == "root-difference") return "root-difference activity used for the published figures; admissibility measured";
    if (family == "mrss") return "harmonic-type activity, alpha = 1";
    if (family == "mass-action") return "constant activity, alpha = 2";
    return "unknown";
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config, const json& extra) {
    json m{{"schema", "dlss-manifest/1"},
           {"command", command},
           {"version", dlss_version()},
           {"seed", config.at("seed")},
           {"config", config},
           {"quadrature",
            {{"dissipation_in_time", "trapezoidal"},
             {"cell_average", "gauss-kronrod 31-point checked against 15-point"}}}};
    m.update(extra);
    std::ofstream(dir / "manifest.json") << m.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& file, const std::string& schema, const std::vector<std::string>& meta) {
    std::ofstream out(file);
    if (!out) throw Failure{kExitConfig, "cannot write " + file.string()};
    out << "# schema: " << schema << '\n' << "# version: " << dlss_version() << '\n';
    for (const auto& line : meta) out << "# " << line << '\n';
    return out;
}

fs::path output_dir(const json& c) {
    fs::path dir = get<std::string>(c, "/output/dir"_json_pointer);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) config_error("output: cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

// ---- solve ----

struct SolveJob {
    double alpha;
    std::size_t n;
    double dt;
    fs::path dir;
    // filled by the worker
    int exit_code = 0;
    std::string error;
    double edb = NAN;
    std::size_t steps = 0;
};

void run_solve_job(const json& c, SolveJob& job) {
    Activity a;
    make_activity(c, job.alpha, a);
    State c0;
    make_initial(c, job.n, c0);
    dlss_solver_config s = solver_config(c);
    s.dt = job.dt;
    if (s.dt == 0.0) s.dt = s.cfl / std::pow(static_cast<double>(job.n), 4);  // what the solver would pick
    job.dt = s.dt;
    Run run;
    check(dlss_solve(a.get(), &s, c0.get(), run.out()), "solve");

    const std::size_t n = dlss_trajectory_grid_size(run.get());
    const std::size_t len = dlss_trajectory_length(run.get());
    dlss_run_stats stats;
    check(dlss_trajectory_stats(run.get(), &stats), "stats");
    const std::string family = dlss_activity_family(a.get());
    const std::vector<std::string> meta{"family: " + family,
                                        "alpha: " + num(job.alpha),
                                        "n: " + std::to_string(n),
                                        "dt: " + num(s.dt),
                                        "t_end: " + num(s.t_end),
                                        "initial: " + get<std::string>(c, "/initial/preset"_json_pointer),
                                        "quadrature: trapezoidal"};
    fs::create_directories(job.dir);
    {
        auto out = open_csv(job.dir / "trajectory.csv", "dlss-trajectory/1", meta);
        out << "t,k,c_k,J_k\n";
        std::vector<double> cv(n), jv(n);
        for (std::size_t i = 0; i < len; ++i) {
            double t = 0.0;
            check(dlss_trajectory_snapshot(run.get(), i, &t, cv.data(), jv.data(), n), "snapshot");
            for (std::size_t k = 0; k < n; ++k) out << num(t) << ',' << k << ',' << num(cv[k]) << ',' << num(jv[k]) << '\n';
        }
    }
    {
        auto m = meta;
        if (stats.right_endpoint_start) m.push_back("dissipation: first interval used its right endpoint (infinite R at t = 0)");
        auto out = open_csv(job.dir / "diagnostics.csv", "dlss-diagnostics/1", m);
        out << "t,energy,primal,slope,cum_dissipation,edb_residual,mass,min_density\n";
        dlss_diagnostics d;
        for (std::size_t i = 0; i < len; ++i) {
            check(dlss_trajectory_diagnostics(run.get(), i, &d), "diagnostics");
            out << num(d.t) << ',' << num(d.energy) << ',' << num(d.primal) << ',' << num(d.slope) << ','
                << num(d.cum_dissipation) << ',' << num(d.edb_residual) << ',' << num(d.mass) << ','
                << num(d.min_density) << '\n';
        }
        job.edb = d.edb_residual;
    }
    job.steps = stats.steps;

    json run_config = c;
    run_config["activity"]["alpha"] = job.alpha;
    run_config["grid"]["n"] = n;
    run_config["solver"]["dt"] = s.dt;
    write_manifest(job.dir, "solve", run_config,
                   {{"activity", {{"family", family}, {"alpha", job.alpha}, {"provenance", provenance(family)}}},
                    {"files", {"trajectory.csv", "diagnostics.csv"}},
                    {"stats",
                     {{"steps", stats.steps},
                      {"substeps", stats.substeps},
                      {"newton_iterations", stats.newton_iterations},
                      {"halvings", stats.halvings},
                      {"max_residual", finite_or_null(stats.max_residual)},
                      {"max_mass_drift", finite_or_null(stats.max_mass_drift)},
                      {"min_density_positive_t", finite_or_null(stats.min_density_positive_t)},
                      {"max_entropy_increase", finite_or_null(stats.max_entropy_increase)},
                      {"edb_residual", finite_or_null(job.edb)}}}});
}

void run_pool(std::vector<SolveJob>& jobs, const json& c, unsigned workers) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                run_solve_job(c, jobs[i]);
            } catch (const Failure& f) {
                jobs[i].exit_code = f.exit_code;
                jobs[i].error = f.message;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::max(1u, workers); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

std::string dir_name(double alpha, std::size_t n, double dt, bool with_dt) {
    std::ostringstream s;
    s << "alpha" << alpha << "_n" << n;
    if (with_dt) s << "_dt" << dt;
    return s.str();
}

int cmd_solve(const json& c) {
    const fs::path root = output_dir(c);
    auto alphas = get<std::vector<double>>(c, "/sweep/alpha"_json_pointer);
    auto ns = get<std::vector<std::size_t>>(c, "/sweep/n"_json_pointer);
    auto dts = get<std::vector<double>>(c, "/sweep/dt"_json_pointer);
    const bool sweep = !alphas.empty() || !ns.empty() || !dts.empty();
    if (alphas.empty()) alphas.push_back(get<double>(c, "/activity/alpha"_json_pointer));
    if (ns.empty()) ns.push_back(get<std::size_t>(c, "/grid/n"_json_pointer));
    if (dts.empty()) dts.push_back(get<double>(c, "/solver/dt"_json_pointer));
    if (get<std::string>(c, "/initial/preset"_json_pointer) == "custom-csv" && ns.size() > 1)
        config_error("sweep: custom-csv initial data fixes n");

    std::vector<SolveJob> jobs;
    for (double a : alphas)
        for (std::size_t n : ns)
            for (double dt : dts)
                jobs.push_back({a, n, dt, sweep ? root / dir_name(a, n, dt, dts.size() > 1) : root, 0, {}, NAN, 0});
    unsigned workers = get<unsigned>(c, "/sweep/workers"_json_pointer);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    run_pool(jobs, c, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));

    int code = 0;
    for (const auto& j : jobs) {
        if (j.exit_code) {
            std::cerr << "dlss solve: alpha=" << j.alpha << " n=" << j.n << ": " << j.error << '\n';
            code = std::max(code, j.exit_code);
        } else {
            std::cout << "alpha=" << j.alpha << " n=" << j.n << " dt=" << num(j.dt) << " steps=" << j.steps
                      << " edb_residual=" << num(j.edb) << "  -> " << j.dir.string() << '\n';
        }
    }
    if (dts.size() > 1) {
        auto out = open_csv(root / "edb_vs_dt.csv", "dlss-edb/1", {"quadrature: trapezoidal"});
        out << "alpha,n,dt,edb_residual,order,steps\n";
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            const auto& j = jobs[i];
            const bool first = i % dts.size() == 0;
            const double order = first || j.exit_code || jobs[i - 1].exit_code
                                     ? NAN
                                     : std::log(std::abs(jobs[i - 1].edb / j.edb)) / std::log(jobs[i - 1].dt / j.dt);
            out << num(j.alpha) << ',' << j.n << ',' << num(j.dt) << ',' << num(j.edb) << ',' << num(order) << ','
                << j.steps << '\n';
        }
        std::cout << "EDB table: " << (root / "edb_vs_dt.csv").string() << '\n';
    }
    if (sweep) write_manifest(root, "solve-sweep", c, {{"runs", jobs.size()}});
    return code;
}

// ---- profile ----

int cmd_profile(const json& c) {
    const fs::path root = output_dir(c);
    dlss_shooting_options o;
    dlss_shooting_options_default(&o);
    o.b_lo = get<double>(c, "/profile/b_lo"_json_pointer);
    o.b_hi = get<double>(c, "/profile/b_hi"_json_pointer);
    o.ode_tol = get<double>(c, "/profile/ode_tol"_json_pointer);
    o.event_threshold = get<double>(c, "/profile/event_threshold"_json_pointer);
    o.y_max = get<double>(c, "/profile/y_max"_json_pointer);
    o.b_tol = get<double>(c, "/profile/b_tol"_json_pointer);
    o.max_bisections = get<int>(c, "/profile/max_bisections"_json_pointer);
    o.samples = get<std::size_t>(c, "/profile/samples"_json_pointer);

    json summary = json::array();
    std::vector<std::string> files;
    int code = 0;
    for (double alpha : get<std::vector<double>>(c, "/profile/alphas"_json_pointer)) {
        Profile p;
        const dlss_status s = dlss_shoot_profile(alpha, &o, p.out());
        if (s != DLSS_OK) {
            std::cerr << "dlss profile: alpha=" << alpha << ": " << dlss_status_name(s) << ": " << dlss_last_error()
                      << '\n';
            code = std::max(code, exit_code_for(s));
            continue;
        }
        dlss_profile_info info;
        check(dlss_profile_info_get(p.get(), &info), "profile");
        std::vector<double> y(info.samples), phi(info.samples);
        check(dlss_profile_samples(p.get(), y.data(), phi.data(), info.samples), "profile");

        const bool experimental = alpha <= 0.0;
        if (experimental) std::cerr << "dlss profile: alpha=" << alpha << " is outside the analysed range (experimental)\n";
        std::ostringstream name;
        name << "profile_alpha" << alpha << ".csv";
        std::vector<std::string> meta{"alpha: " + num(info.alpha),
                                      "gamma: " + num(info.gamma),
                                      "b_star: " + num(info.b_star),
                                      "b_uncertainty: " + num(info.b_uncertainty),
                                      "bisections: " + std::to_string(info.bisections),
                                      "y_end: " + num(info.y_end),
                                      "tail: " + std::string(info.tail),
                                      "tail_exponent: " + num(info.tail_exponent),
                                      "tail_stderr: " + num(info.tail_stderr),
                                      "tail_curvature: " + num(info.tail_curvature),
                                      "support_radius: " + num(info.support_radius),
                                      "fit_window_phi: " + num(info.fit_phi_lo) + " " + num(info.fit_phi_hi),
                                      "fit_points: " + std::to_string(info.fit_points),
                                      std::string("experimental: ") + (experimental ? "true" : "false")};
        auto out = open_csv(root / name.str(), "dlss-profile/1", meta);
        out << "y,phi\n";
        for (std::size_t i = 0; i < y.size(); ++i) out << num(y[i]) << ',' << num(phi[i]) << '\n';
        files.push_back(name.str());
        summary.push_back({{"alpha", alpha},
                           {"b_star", info.b_star},
                           {"tail", info.tail},
                           {"tail_exponent", finite_or_null(info.tail_exponent)},
                           {"support_radius", finite_or_null(info.support_radius)},
                           {"experimental", experimental},
                           {"file", name.str()}});
        std::cout << "alpha=" << alpha << " b*=" << num(info.b_star) << " tail=" << info.tail
                  << " exponent=" << num(info.tail_exponent) << " support=" << num(info.support_radius) << '\n';
    }
    write_manifest(root, "profile", c, {{"profiles", summary}, {"files", files}});
    return code;
}

// ---- wave-check ----

int cmd_wave(const json& c) {
    const fs::path root = output_dir(c);
    const double alpha = get<double>(c, "/wave/alpha"_json_pointer);
    const double kappa = get<double>(c, "/wave/kappa"_json_pointer);
    const auto h = get<std::vector<double>>(c, "/wave/h"_json_pointer);
    if (h.empty()) config_error("wave: empty h ladder");
    std::vector<dlss_wave_row> rows(h.size());
    check(dlss_wave_residual(alpha, kappa, get<double>(c, "/wave/t"_json_pointer),
                             get<double>(c, "/wave/margin"_json_pointer), get<double>(c, "/wave/width"_json_pointer),
                             get<std::size_t>(c, "/wave/points"_json_pointer), h.data(), h.size(), rows.data()),
          "wave-check");
    double delta = 0.0, speed = 0.0;
    check(dlss_wave_parameters(alpha, kappa, &delta, &speed), "wave-check");
    auto out = open_csv(root / "wave_residual.csv", "dlss-wave/1",
                        {"alpha: " + num(alpha), "kappa: " + num(kappa), "delta: " + num(delta), "speed: " + num(speed)});
    out << "h,residual,relative,order\n";
    std::cout << "alpha=" << alpha << " kappa=" << kappa << " delta=" << num(delta) << " speed=" << num(speed) << '\n';
    for (const auto& r : rows) {
        out << num(r.h) << ',' << num(r.residual) << ',' << num(r.relative) << ',' << num(r.order) << '\n';
        std::printf("  h=%-8.3g residual=%-12.4e relative=%-12.4e order=%.3f\n", r.h, r.residual, r.relative, r.order);
    }
    write_manifest(root, "wave-check", c, {{"files", {"wave_residual.csv"}}});
    return 0;
}

// ---- check ----

int cmd_check(const json& c, bool to_stdout) {
    json options = c.at("check");
    if (!options.contains("seed")) options["seed"] = c.at("seed");
    char* report = nullptr;
    int passed = 0;
    check(dlss_run_checks(options.dump().c_str(), &report, &passed), "check");
    const json parsed = json::parse(report);
    dlss_string_free(report);
    if (to_stdout) {
        std::cout << parsed.dump(2) << '\n';
    } else {
        const fs::path root = output_dir(c);
        std::ofstream(root / "check_report.json") << parsed.dump(2) << '\n';
        write_manifest(root, "check", c, {{"files", {"check_report.json"}}});
        std::size_t failed = 0;
        for (const auto& r : parsed.at("checks")) {
            const bool ok = r.at("passed").get<bool>();
            failed += !ok;
            std::cout << (ok ? "PASS " : "FAIL ") << r.at("group").get<std::string>() << ": "
                      << r.at("name").get<std::string>() << "  (" << r.at("detail").get<std::string>() << ")\n";
        }
        std::cout << parsed.at("checks").size() - failed << " passed, " << failed << " failed\n";
    }
    return passed ? 0 : kExitChecks;
}

// ---- converge ----

int cmd_converge(const json& c) {
    const fs::path root = output_dir(c);
    Activity a;
    const double alpha = get<double>(c, "/activity/alpha"_json_pointer);
    make_activity(c, alpha, a);
    const auto ns = get<std::vector<std::size_t>>(c, "/converge/n"_json_pointer);
    if (ns.empty()) config_error("converge: empty n list");
    dlss_solver_config s = solver_config(c);
    std::vector<dlss_refinement_row> rows(ns.size());
    check(dlss_refinement_sine(a.get(), get<double>(c, "/converge/mean"_json_pointer),
                               get<double>(c, "/converge/amplitude"_json_pointer),
                               get<int>(c, "/converge/mode"_json_pointer), get<double>(c, "/converge/t_end"_json_pointer),
                               get<double>(c, "/converge/dt"_json_pointer), &s, ns.data(), ns.size(), rows.data()),
          "converge");
    const std::string family = dlss_activity_family(a.get());
    auto out = open_csv(root / "refinement.csv", "dlss-refinement/1",
                        {"family: " + family, "alpha: " + num(alpha),
                         "initial: mean + amplitude sin(2 pi mode x), cell averages",
                         "l1_to_next: L1 distance to the pairwise average of the next finer run",
                         "dissipation_gap: dissipation_discrete - dissipation_embedded"});
    out << "n,energy_discrete,energy_embedded,dissipation_discrete,dissipation_embedded,dissipation_gap,l1_to_next,"
           "order,steps\n";
    std::printf("%6s %22s %22s %14s %14s %11s %10s %6s\n", "N", "E_N", "E(iota c)", "D_N", "D_embedded", "L1 next",
                "order", "steps");
    for (const auto& r : rows) {
        out << r.n << ',' << num(r.energy_discrete) << ',' << num(r.energy_embedded) << ','
            << num(r.dissipation_discrete) << ',' << num(r.dissipation_embedded) << ','
            << num(r.dissipation_discrete - r.dissipation_embedded) << ',' << num(r.l1_to_next) << ','
            << num(r.order) << ',' << r.steps << '\n';
        std::printf("%6zu %22.17g %22.17g %14.8g %14.8g %11.3e %10.4f %6zu\n", r.n, r.energy_discrete,
                    r.energy_embedded, r.dissipation_discrete, r.dissipation_embedded, r.l1_to_next, r.order, r.steps);
    }
    write_manifest(root, "converge", c,
                   {{"activity", {{"family", family}, {"alpha", alpha}, {"provenance", provenance(family)}}},
                    {"files", {"refinement.csv"}}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DLSS-alpha reaction-rate solver"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(dlss_version()));

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    app.add_option("-c,--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("-o,--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed for randomized checks");

    // solve
    auto* solve = app.add_subcommand("solve", "integrate the discrete flow and write trajectory/diagnostics CSVs");
    std::optional<std::string> family, preset, csv_path, jacobian;
    std::optional<double> alpha, eps, dt, cfl, t_end, tol, damping, ell, amplitude;
    std::optional<std::size_t> n;
    std::optional<int> max_iter, halvings, record_every, mode;
    std::optional<bool> normalize;
    std::optional<unsigned> workers;
    std::vector<double> sweep_alpha, sweep_dt;
    std::vector<std::size_t> sweep_n;
    {
        auto* sub = solve;
        sub->add_option("--family", family, "activity family");
        sub->add_option("--alpha", alpha, "mobility exponent");
        sub->add_option("--epsilon-diag", eps);
        sub->add_option("--n", n, "grid size");
        sub->add_option("--dt", dt, "time step (0: cfl / N^4)");
        sub->add_option("--cfl", cfl);
        sub->add_option("--t-end", t_end);
        sub->add_option("--newton-tol", tol);
        sub->add_option("--newton-max-iter", max_iter);
        sub->add_option("--damping", damping);
        sub->add_option("--jacobian", jacobian)->check(CLI::IsMember({"analytic", "finite-difference"}));
        sub->add_option("--max-halvings", halvings);
        sub->add_option("--record-every", record_every);
        sub->add_option("--initial", preset)->check(CLI::IsMember({"uniform", "bump", "perturbed-uniform", "custom-csv"}));
        sub->add_option("--ell", ell);
        sub->add_option("--normalize", normalize);
        sub->add_option("--amplitude", amplitude);
        sub->add_option("--mode", mode);
        sub->add_option("--initial-csv", csv_path, "density CSV for --initial custom-csv");
        sub->add_option("--sweep-alpha", sweep_alpha);
        sub->add_option("--sweep-n", sweep_n);
        sub->add_option("--sweep-dt", sweep_dt, "several values give an EDB-vs-dt table");
        sub->add_option("--workers", workers);
    }

    auto* profile = app.add_subcommand("profile", "shoot similarity profiles");
    std::vector<double> profile_alphas;
    std::optional<double> b_lo, b_hi, threshold;
    profile->add_option("--alpha", profile_alphas, "one or more exponents; alpha <= 0 is experimental");
    profile->add_option("--b-lo", b_lo);
    profile->add_option("--b-hi", b_hi);
    profile->add_option("--event-threshold", threshold);

    auto* wave = app.add_subcommand("wave-check", "finite-difference residual of the explicit traveling front");
    std::optional<double> wave_alpha, kappa;
    std::vector<double> wave_h;
    wave->add_option("--alpha", wave_alpha);
    wave->add_option("--kappa", kappa);
    wave->add_option("--step", wave_h, "difference steps, largest first");

    auto* checks = app.add_subcommand("check", "property suites; JSON report, exit 1 on any failure");
    bool quick = false, to_stdout = false;
    checks->add_flag("--quick", quick, "fewer samples and no EDB runs");
    checks->add_flag("--json", to_stdout, "print the JSON report instead of writing files");

    auto* converge = app.add_subcommand("converge", "refinement study on smooth data");
    std::optional<double> conv_alpha, conv_amp, conv_dt, conv_t;
    std::vector<std::size_t> conv_n;
    std::optional<std::string> conv_family;
    converge->add_option("--alpha", conv_alpha);
    converge->add_option("--family", conv_family);
    converge->add_option("--n", conv_n, "grid sizes, each twice the previous");
    converge->add_option("--amplitude", conv_amp);
    converge->add_option("--dt", conv_dt);
    converge->add_option("--t-end", conv_t);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        json c = load_config(config_path);
        override(c, "/output/dir", out_dir);
        override(c, "/seed", seed);
        override(c, "/activity/family", family);
        override(c, "/activity/family", conv_family);
        override(c, "/activity/alpha", alpha);
        override(c, "/activity/alpha", conv_alpha);
        override(c, "/activity/epsilon_diag", eps);
        override(c, "/grid/n", n);
        override(c, "/solver/dt", dt);
        override(c, "/solver/cfl", cfl);
        override(c, "/solver/t_end", t_end);
        override(c, "/solver/newton_tol", tol);
        override(c, "/solver/newton_max_iter", max_iter);
        override(c, "/solver/damping", damping);
        override(c, "/solver/jacobian", jacobian);
        override(c, "/solver/max_halvings", halvings);
        override(c, "/output/record_every", record_every);
        override(c, "/initial/preset", preset);
        override(c, "/initial/ell", ell);
        override(c, "/initial/normalize", normalize);
        override(c, "/initial/amplitude", amplitude);
        override(c, "/initial/mode", mode);
        override(c, "/initial/path", csv_path);
        override(c, "/sweep/alpha", sweep_alpha);
        override(c, "/sweep/n", sweep_n);
        override(c, "/sweep/dt", sweep_dt);
        override(c, "/sweep/workers", workers);
        override(c, "/profile/alphas", profile_alphas);
        override(c, "/profile/b_lo", b_lo);
        override(c, "/profile/b_hi", b_hi);
        override(c, "/profile/event_threshold", threshold);
        override(c, "/wave/alpha", wave_alpha);
        override(c, "/wave/kappa", kappa);
        override(c, "/wave/h", wave_h);
        override(c, "/converge/n", conv_n);
        override(c, "/converge/amplitude", conv_amp);
        override(c, "/converge/dt", conv_dt);
        override(c, "/converge/t_end", conv_t);
        if (quick) c["check"].merge_patch({{"pair_samples", 10000}, {"state_samples", 1000}, {"edb", false}});

        if (*solve) return cmd_solve(c);
        if (*profile) return cmd_profile(c);
        if (*wave) return cmd_wave(c);
        if (*checks) return cmd_check(c, to_stdout);
        if (*converge) return cmd_converge(c);
    } catch (const Failure& f) {
        std::cerr << "dlss: " << f.message << '\n';
        return f.exit_code;
    } catch (const json::exception& e) {
        std::cerr << "dlss: config: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "dlss: " << e.what() << '\n';
        return kExitSolver;
    }
    return 0;
}
