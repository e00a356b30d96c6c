// Acceptance run: one PASS/FAIL line per criterion, indented detail lines above it.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "dlss/checks.hpp"
#include "dlss/continuum.hpp"
#include "dlss/error.hpp"
#include "dlss/initial.hpp"
#include "dlss/integrator.hpp"
#include "dlss/similarity.hpp"

using namespace dlss;

namespace {

constexpr double kMassDrift = 1e-11;
constexpr double kEntropySlack = 1e-10;
constexpr double kEdbOrder = 0.9;
constexpr double kShootError = 1e-6;
constexpr double kBStarTol = 1e-6;
constexpr double kWaveOrderTol = 0.05;
constexpr double kTailHalfDecay = 0.3;    // alpha = 0.5: 6 +- 0.3
constexpr double kTailSupport = 0.1;      // alpha = 2: 3 +- 0.1
constexpr double kSelfConvergence = 1.8;

int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
    std::printf("[%s] %d %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    failures += !ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Run {
    double alpha = 1.0;
    std::size_t n = 0;
    bool bump = false;
    // filled by the worker
    double drift = 0, min_pos = 0, slack = 0, seconds = 0;
    std::size_t steps = 0;
    std::string error;
};

void structure() {
    // Default step dt = 0.1 / N^4 and a fixed number of steps, so every N covers the same
    // number of explicit time scales.
    constexpr int kSteps = 400;
    std::vector<Run> runs;
    for (double a : {0.5, 1.0, 2.0, 4.0, 7.0})
        for (std::size_t n : {64u, 256u, 1024u})
            for (bool b : {true, false}) {
                Run& r = runs.emplace_back();
                r.alpha = a, r.n = n, r.bump = b;
            }

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < runs.size();) {
            Run& r = runs[i];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                SolverConfig cfg;
                cfg.t_end = kSteps * cfg.resolved_dt(r.n);
                cfg.record_every = 10;
                const auto c0 = r.bump ? bump_profile(r.n) : perturbed_uniform(r.n);
                const auto tr = solve(ActivitySpec::make(ActivityFamily::StolarskyPower, r.alpha), cfg, GridState(c0));
                r.drift = tr.stats.max_mass_drift;
                r.min_pos = tr.stats.min_density_positive_t;
                r.slack = tr.stats.max_entropy_increase;
                r.steps = tr.stats.steps;
            } catch (const std::exception& e) {
                r.error = e.what();
            }
            r.seconds = seconds_since(t0);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < std::max(1u, std::thread::hardware_concurrency()); ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    bool ok = true;
    std::size_t failed = 0, errors = 0, mass = 0, positivity = 0, entropy = 0;
    for (const auto& r : runs) {
        const bool good = r.error.empty() && r.drift <= kMassDrift && r.min_pos > 0 && r.slack <= kEntropySlack;
        ok = ok && good;
        failed += !good;
        if (!r.error.empty()) {
            ++errors;
        } else {
            mass += r.drift > kMassDrift;
            positivity += !(r.min_pos > 0);
            entropy += r.slack > kEntropySlack;
        }
        if (r.error.empty())
            std::printf("    alpha=%-3g N=%-5zu %-9s drift=%.2e min=%.3e dE+=%.2e steps=%zu %.1fs%s\n", r.alpha, r.n,
                        r.bump ? "bump" : "perturbed", r.drift, r.min_pos, r.slack, r.steps, r.seconds,
                        good ? "" : "  <-");
        else
            std::printf("    alpha=%-3g N=%-5zu %-9s error: %s\n", r.alpha, r.n, r.bump ? "bump" : "perturbed",
                        r.error.c_str());
    }
    verdict(1, ok,
            "structure preservation: mass drift <= 1e-11, min density > 0 for t > 0, entropy increase <= 1e-10 (" +
                std::to_string(runs.size() - failed) + "/" + std::to_string(runs.size()) + " runs; failures: mass " +
                std::to_string(mass) + ", positivity " + std::to_string(positivity) + ", entropy " +
                std::to_string(entropy) + ", solver " + std::to_string(errors) + ")");
}

void edb() {
    bool ok = true;
    std::string orders;
    for (double a : {1.0, 2.0}) {
        const auto r = edb_check(a, 128);
        std::printf("    alpha=%g %s\n", a, r.detail.c_str());
        ok = ok && r.passed && r.measured >= kEdbOrder;
        orders += " " + std::to_string(r.measured);
    }
    verdict(2, ok, "EDB residual order under dt halving >= 0.9 at N = 128, alpha in {1, 2}; worst orders" + orders);
}

void inequalities() {
    CheckOptions o;  // 1e5 pairs, 1e4 states, 2000 x 2000 grid, tolerance 1e-9
    o.edb = false;
    const auto results = run_checks(o);
    std::size_t bad = 0;
    for (const auto& r : results)
        if (!r.passed) {
            ++bad;
            std::printf("    FAILED %s / %s: %s\n", r.group.c_str(), r.name.c_str(), r.detail.c_str());
        }
    verdict(3, bad == 0,
            "inequality suites, zero violations beyond 1e-9 relative (" + std::to_string(results.size() - bad) + "/" +
                std::to_string(results.size()) + " checks)");
}

void oracles() {
    bool ok = true;

    const auto g = shoot_profile(1.0);
    double err = 0.0;
    for (std::size_t i = 0; i < g.y.size() && g.y[i] <= 4.0; ++i)
        err = std::max(err, std::abs(g.phi[i] - std::exp(-g.y[i] * g.y[i] / 4)));
    const bool i_ok = err <= kShootError && std::abs(g.b_star + 0.5) <= kBStarTol;
    std::printf("    (i)   alpha=1 b*=%.12f max|Phi - exp(-y^2/4)| on [0,4] = %.2e %s\n", g.b_star, err,
                i_ok ? "ok" : "FAIL");
    ok = ok && i_ok;

    const auto w = wave_residual(TravelingWave::make(1.5, 1.0));
    bool ii_ok = true;
    std::printf("    (ii)  alpha=1.5 front residual orders:");
    for (std::size_t k = 1; k < w.size(); ++k) {
        std::printf(" %.4f", w[k].order);
        ii_ok = ii_ok && std::abs(w[k].order - 4.0) <= 4.0 * kWaveOrderTol;
    }
    std::printf(" %s\n", ii_ok ? "ok" : "FAIL");
    ok = ok && ii_ok;

    bool iii_ok = true;
    for (auto [a, target, tol] : {std::tuple{0.5, 6.0, kTailHalfDecay}, std::tuple{2.0, 3.0, kTailSupport}}) {
        try {
            const auto p = shoot_profile(a);
            const bool good = p.tail != TailKind::None && std::abs(p.tail_exponent - target) <= tol;
            std::printf("    (iii) alpha=%g tail %s exponent %.4f (target %g +- %g, curvature %.3g) %s\n", a,
                        tail_kind_name(p.tail), p.tail_exponent, target, tol, p.tail_curvature, good ? "ok" : "FAIL");
            iii_ok = iii_ok && good;
        } catch (const Error& e) {
            std::printf("    (iii) alpha=%g error: %s\n", a, e.what());
            iii_ok = false;
        }
    }
    ok = ok && iii_ok;
    verdict(4, ok, "closed-form oracles: Gaussian profile, 4th-order front residual, tail exponents");
}

void embeddings() {
    std::vector<CheckResult> rs = embedding_checks(10000, 11);
    rs.push_back(flux_embedding_check(1000, 12));
    const auto comm = commutator_checks({16, 32, 64, 128, 256, 512, 1024, 2048, 4096});
    rs.insert(rs.end(), comm.begin(), comm.end());
    bool ok = true;
    for (const auto& r : rs) {
        std::printf("    %s %s: %s\n", r.passed ? "ok  " : "FAIL", r.name.c_str(), r.detail.c_str());
        ok = ok && r.passed;
    }
    verdict(5, ok, "embedding identities: exact entropy, ||I_N J||_1 <= 2||J||_1, commutator <= (2 pi)^3/(3N)");
}

void self_convergence() {
    RefinementProblem p;
    p.initial = sine_density(1.0, 0.5);
    p.t_end = 1e-4;
    p.dt = 1e-6;
    p.solver.record_every = 10;
    const std::vector<std::size_t> ns{64, 128, 256, 512, 1024};
    const auto rows = refinement_study(ActivitySpec::make(ActivityFamily::StolarskyPower, 1.0), p, ns);
    bool ok = true;
    for (const auto& r : rows) {
        std::printf("    N=%-5zu L1 to next %.4e order %.4f E_N - E(iota c) = %.1e D_N - D(iota c) = %.3e\n", r.n,
                    r.l1_to_next, r.order, r.energy_discrete - r.energy_embedded,
                    r.dissipation_discrete - r.dissipation_embedded);
        if (std::isfinite(r.order)) ok = ok && r.order >= kSelfConvergence;
    }
    verdict(6, ok, "self-convergence of smooth alpha = 1 runs: L1 order >= 1.8 for N = 64 ... 1024");
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    auto guarded = [](int id, void (*f)()) {
        try {
            f();
        } catch (const std::exception& e) {
            verdict(id, false, std::string("aborted: ") + e.what());
        }
    };
    guarded(1, structure);
    guarded(2, edb);
    guarded(3, inequalities);
    guarded(4, oracles);
    guarded(5, embeddings);
    guarded(6, self_convergence);
    std::printf("%d of 6 criteria failed (%.0f s)\n", failures, seconds_since(t0));
    return failures;
}
