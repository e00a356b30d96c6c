#pragma once

#include <vector>

#include "dlss/kinetics.hpp"
#include "dlss/linalg.hpp"
#include "dlss/trajectory.hpp"

namespace dlss {

/// d rhs / d c as a cyclic pentadiagonal matrix. Stencils touching a zero cell are differenced
/// one-sidedly in both modes since the analytic derivatives are unbounded there.
linalg::CyclicBandMatrix jacobian(const ActivitySpec& spec, const GridState& c,
                                  JacobianMode mode = JacobianMode::Analytic);

struct SubStep {
    double dt = 0.0;
    GridState state;
    FluxField flux;
};

struct StepResult {
    GridState state;
    FluxField flux;
    std::vector<SubStep> substeps;  // more than one when the step had to be split
    int newton_iterations = 0;
    int halvings = 0;
    double residual = 0.0;
};

/// One implicit Euler step c+ - dt laplacian(J[c+]) = c of length dt.
StepResult step(const ActivitySpec& spec, const SolverConfig& config, const GridState& c, double dt);
inline StepResult step(const ActivitySpec& spec, const SolverConfig& config, const GridState& c) {
    return step(spec, config, c, config.resolved_dt(c.size()));
}

Trajectory solve(const ActivitySpec& spec, const SolverConfig& config, const GridState& c0);

}  // namespace dlss
