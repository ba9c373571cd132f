#pragma once

#include <vector>

#include "tflow/model.hpp"
#include "tflow/state.hpp"

namespace tflow {

/// Fully explicit reference step, independently discretized in plain
/// serial loops: divergence-form forcing, unsplit potential, central
/// advection, explicit viscosity, then its own projection solve.
/// Requires dt <= 0.05 min(dx,dy)^4 / sigma.
State explicit_reference_step(const State& s, double dt, const ModelParams& params);

/// Analytic growth rate -kappa^2 (Psi''(0) + sigma kappa^2) of the kappa
/// mode about the homogeneous mixed state.
double spinodal_growth_oracle(double kappa, const ModelParams& params);

struct ConvergenceRow {
    double h = 0.0;  // dx or dt of the level
    double err_l2 = 0.0;
    double err_linf = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double order_l2 = 0.0;  // least-squares slope on log-log
    double order_linf = 0.0;
};

/// Least-squares slope of log(err) against log(h).
double fitted_order(const std::vector<ConvergenceRow>& rows, bool use_linf);

enum class Subproblem { heat, cahn_hilliard, stokes };

/// Spatial refinement against the analytic solution (dt tied to dx^2) and
/// temporal self-convergence on a fixed grid.  The steady-free Stokes
/// study reports only the spatial table.
struct StudyResult {
    ConvergenceTable spatial;
    ConvergenceTable temporal;
};
StudyResult manufactured_solution_study(Subproblem which, int levels);

/// Grid-normalized L2 distance over (u, phi, psi).
double state_distance(const State& a, const State& b);

struct CascadeConfig {
    int n = 32;
    double t_end = 0.1;
    double dt = 5e-4;
};

struct CascadeReport {
    std::vector<double> alphas;
    std::vector<double> alpha_distances;  // to the alpha = 0 trajectory
    std::vector<double> xis;
    std::vector<double> xi_distances;     // to the smallest-xi trajectory
};

/// Regularization study on a fixed smooth scenario: filter strengths
/// alphas (distance to the unfiltered run at t_end) and tail widths xis
/// on separated data (the regularization is then inactive).
CascadeReport cascade_study(const CascadeConfig& cfg,
                            const std::vector<double>& alphas,
                            const std::vector<double>& xis);

}  // namespace tflow
