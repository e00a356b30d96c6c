#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dlss/kinetics.hpp"
#include "dlss/trajectory.hpp"

namespace dlss {

/// One line of the property report. For the negative control, passed means the violation was detected.
struct CheckResult {
    std::string group;
    std::string name;
    bool passed = false;
    double measured = 0.0;  // worst margin or measured constant, as described by detail
    double bound = 0.0;
    std::size_t samples = 0;
    std::size_t violations = 0;
    std::string detail;
};

struct CheckOptions {
    std::vector<double> alphas{0.5, 1.0, 2.0, 4.0};
    std::size_t pair_samples = 100000;
    std::size_t state_samples = 10000;
    std::size_t polynomial_grid = 2000;
    std::size_t flux_samples = 1000;
    std::vector<std::size_t> commutator_n{16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    std::uint64_t seed = 20240611;
    double tolerance = 1e-9;
    bool edb = true;
    bool negative_control = true;
};

/// A3, the Stolarsky lemma chain, mobility bounds and homogeneity for one family.
std::vector<CheckResult> admissibility_checks(const ActivitySpec& spec, std::size_t samples, std::uint64_t seed,
                                              double tolerance);
/// C(s) <= (q/(q-1)) Cbar(s|w) + 4 w^q/(q-1) over log-uniform (s, w) and q in (1, 8].
CheckResult magical_estimate_check(std::size_t samples, std::uint64_t seed, double tolerance);
/// lambda -> Cbar(lambda s | lambda^2 w) nondecreasing.
CheckResult monotonicity_check(std::size_t samples, std::uint64_t seed, double tolerance);
/// S_{alpha,N}(c) >= (1/(24 alpha^2)) (1/N) sum[(lap c^(a/2))^2 + (d- c^(a/4))^4 + (d+ c^(a/4))^4].
CheckResult spatial_regularity_check(const ActivitySpec& spec, std::size_t states, std::uint64_t seed, double tolerance);
/// 15t^2 + 2t(x-11)(x-1) + (x-1)^2(3 + 22x + 15x^2) >= 0 on a grid over x in [0, 20], t in [0, x^2].
CheckResult polynomial_check(std::size_t grid, double tolerance);
/// C(s) + C*(r) >= s r, with equality at s = 2 sinh(r/2).
std::vector<CheckResult> fenchel_young_checks(std::size_t samples, std::uint64_t seed, double tolerance);
/// S_{alpha,N}(c) = R*_{alpha,N}(c, -lap log c) on positive states, and the duality gap <J, xi> <= R + R*.
std::vector<CheckResult> duality_checks(const ActivitySpec& spec, std::size_t states, std::uint64_t seed, double tolerance);
/// E_N(c) = E(iota_N c) bit for bit and L^p norm preservation, p in {1, 2, 4}.
std::vector<CheckResult> embedding_checks(std::size_t states, std::uint64_t seed);
/// ||I_N J||_1 <= 2 ||J||_{L^1_N} on random fluxes.
CheckResult flux_embedding_check(std::size_t fluxes, std::uint64_t seed);
/// max_k |(iota* xi'')_k - (lap iota* xi)_k| <= (2 pi)^3 / (3N) for xi = sin(2 pi x).
std::vector<CheckResult> commutator_checks(const std::vector<std::size_t>& n_list);
/// Four relaxed-slope forms agree and the useful relation balances for u = 1 + 0.3 sin(2 pi x).
std::vector<CheckResult> relaxed_slope_checks(double alpha);

struct EdbRow {
    double dt = 0.0;
    double residual = 0.0;  // L_{alpha,N}
    double order = 0.0;     // log2 of the ratio to the previous row; NaN on the first
    std::size_t steps = 0;
};
/// Runs the same problem at dt0, dt0/2, ... (halvings + 1 runs) and evaluates L at each.
std::vector<EdbRow> edb_study(const ActivitySpec& spec, const std::vector<double>& c0, double t_end, double dt0,
                              int halvings, const SolverConfig& base = {});
/// EDB order >= 0.9 for alpha on N = 128 perturbed-uniform data over four halvings.
CheckResult edb_check(double alpha, std::size_t n = 128);

/// A3 with sigma = 10, alpha = 1; the check passes when violations are reported.
CheckResult negative_control_check(std::size_t samples, std::uint64_t seed);

std::vector<CheckResult> run_checks(const CheckOptions& options = {});
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace dlss
