#pragma once

#include <string>
#include <vector>

#include "tflow/model.hpp"
#include "tflow/state.hpp"

namespace tflow {

/// Per-step scalars of the energy and dissipation structure; one CSV row.
struct EnergyReport {
    double t = 0.0;
    double e_kin = 0.0;
    double e_coh = 0.0;
    double e_ela = 0.0;
    double e_total = 0.0;
    double dissipation = 0.0;
    double mass = 0.0;  // domain mean of phi
    double max_abs_phi = 0.0;
    double separation_margin = 0.0;  // 1 - max|phi|
    double div_residual = 0.0;       // ||div u||_2 min(dx,dy) / ||u||_2
    double energy_residual = 0.0;    // filled between consecutive reports
};

/// Face-difference quadrature of |grad f|^2 with mirror ghosts; pairs
/// exactly with the five-point Laplacian: result = <f, -lap f>.
double grad_energy_neumann(const ScalarField& f);

/// Energies, dissipation, and bound margins of one state; total function
/// (out-of-range phi is clamped where a coefficient needs it).
EnergyReport energy(const State& s, const ModelParams& params);

/// (E_next - E_prev)/dt + D_next, the defect of the dissipation law.
double energy_residual_between(const EnergyReport& prev, const EnergyReport& next);

struct Violation {
    std::string rule;    // finite-values | phase-bound | divergence | pi-mean | energy
    std::string detail;
};

struct ValidationTolerances {
    double div_tol = 1e-8;
    double pi_mean_tol = 1e-8;
    double phase_bound = 1.0;
    double energy_slack = 0.0;  // absolute; only used with a previous report
};

/// Checks the state invariants; with a previous report also checks energy
/// monotonicity.  Reports violations, never throws.
std::vector<Violation> validate(const State& s, const ModelParams& params,
                                const ValidationTolerances& tol,
                                const EnergyReport* previous = nullptr);

}  // namespace tflow
