#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dlss/kinetics.hpp"
#include "dlss/torus.hpp"
#include "dlss/variational.hpp"

namespace dlss {

enum class JacobianMode { Analytic, FiniteDifference };

struct SolverConfig {
    double dt = 0.0;    // explicit time step; 0 selects cfl / N^4
    double cfl = 0.1;
    double t_end = 0.0;
    double newton_tol = 1e-12;  // max-norm residual, relative to max(1, max_k c_k)
    int newton_max_iter = 50;
    double damping = 0.5;
    JacobianMode jacobian = JacobianMode::Analytic;
    int record_every = 1;
    int max_halvings = 10;

    double resolved_dt(std::size_t n) const;
    /// Throws InvalidArgument on dt < 0, t_end < 0, newton_tol <= 0, damping outside (0, 1) ...
    void validate() const;
};

struct RunStatistics {
    std::size_t steps = 0;
    std::size_t substeps = 0;
    std::size_t newton_iterations = 0;
    std::size_t halvings = 0;
    double max_residual = 0.0;
    double max_mass_drift = 0.0;         // over every accepted substep
    double min_density_positive_t = 0.0;  // min over states with t > 0
    double max_entropy_increase = 0.0;    // max over substeps of E(t+) - E(t)
};

struct Trajectory {
    ActivitySpec spec;
    SolverConfig config;
    std::vector<double> times;
    std::vector<GridState> states;
    std::vector<FluxField> fluxes;
    std::vector<DiagnosticsRecord> diagnostics;
    RunStatistics stats;
    bool right_endpoint_start = false;  // first dissipation interval used its right endpoint only
};

/// L = E(c(T)) - E(c(0)) + D computed from the stored snapshots (trapezoidal in time).
double edb_functional(const ActivitySpec& spec, const Trajectory& trajectory);

}  // namespace dlss
