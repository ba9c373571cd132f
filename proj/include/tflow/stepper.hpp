#pragma once

#include "tflow/linsolve.hpp"
#include "tflow/model.hpp"
#include "tflow/state.hpp"

namespace tflow {

enum class Scheme { semi_implicit, explicit_reference };

struct SolverConfig {
    double dt = 1e-4;
    double newton_tol = 1e-10;
    int newton_max = 50;
    Scheme scheme = Scheme::semi_implicit;
    bool use_potential_form_forcing = true;
    double alpha_filter = 0.0;

    void validate() const;
};

enum class ForcingForm { potential, divergence };

/// Per-step solver diagnostics.
struct StepReport {
    int newton_iters = 0;
    double newton_residual = 0.0;
    int ch_linear_iters = 0;
    int momentum_iters = 0;
    int projection_iters = 0;
    double cfl = 0.0;
    bool cfl_advisory = false;
    double map_det_min = 1.0;
    double map_det_max = 1.0;
};

/// Cell-centered |grad psi|^2 with extrapolation ghosts.
ScalarField grad_psi_squared(const VectorField& psi);

/// mu = -sigma lap phi + Psi_xi'(phi) + (lambda'(phi)/2)|grad psi|^2;
/// the discrete variational derivative of the cohesive + elastic energy.
ScalarField chemical_potential(const ScalarField& phi, const VectorField& psi,
                               const ModelParams& params);

/// Capillary + elastic force on the momentum equation.  The potential
/// form mu grad(phi) - grad(psi)^T div(lambda grad psi) differs from the
/// divergence form -div(lambda grad(psi)^T grad(psi)) - div(grad phi x
/// grad phi) by a discrete gradient, absorbed by the projection.
VectorField momentum_forcing(const ScalarField& phi, const ScalarField& mu,
                             const VectorField& psi, const ModelParams& params,
                             ForcingForm form);

/// Skew advection of a mirror-ghosted scalar: (1/2)[v.grad f + div(v f)];
/// discretely orthogonal to f for any v.
ScalarField advect_phi_skew(const VectorField& v, const ScalarField& f);

/// Skew convection of the velocity, componentwise (1/2)[(v.grad)w + div(v w)];
/// the flux products of two anti-mirror factors take mirror ghosts.
VectorField convect_skew(const VectorField& v, const VectorField& w);

/// -div(nu S(u)), S the symmetrized gradient; no-slip ghosts on u,
/// mirror ghosts on the stress rows, so <op(u), u> = sum nu |S|^2 exactly.
VectorField viscous_operator(const VectorField& u, const ScalarField& nu);

/// Pointwise nu(Sxx^2 + Syy^2 + 2 Sxy^2).
ScalarField viscous_dissipation_density(const VectorField& u, const ScalarField& nu);

/// One implicit convex-split Cahn-Hilliard sub-step:
///   (phi - phi_n)/dt + advection = lap mu + source,
///   mu = -sigma lap phi + F_xi'(phi) - theta0 phi_n + elastic_term,
/// solved by damped Newton with the phase bound max|phi| <= 1 - 1e-12
/// enforced by the line search and the mean pinned to the value the
/// discrete equation conserves.  source may be null.
struct ChStepResult {
    ScalarField phi, mu;
    int newton_iters = 0;
    double residual = 0.0;
    int linear_iters = 0;
};
ChStepResult cahn_hilliard_step(const ScalarField& phi_n, const VectorField& v_adv,
                                const ScalarField& elastic_term,
                                const ScalarField* source, const SolverConfig& cfg,
                                const ModelParams& params);

/// One implicit momentum + projection sub-step:
///   (u* - u_n)/dt + convect_skew(v_adv, u_n) = div(nu S(u*)) - darcy u* + forcing,
/// then (u, pi) = projection of u*.
struct MomentumResult {
    VectorField u;
    ScalarField pi;
    int solve_iters = 0;
    int proj_iters = 0;
};
MomentumResult momentum_step(const VectorField& u_n, const VectorField& v_adv,
                             const ScalarField& nu_field, const ScalarField& darcy_field,
                             const VectorField& forcing, double dt,
                             double rel_tol = 1e-12);

/// One first-order IMEX step: semi-Lagrangian psi transport, implicit
/// convex-split Cahn-Hilliard solve, implicit momentum, projection.
State step(const State& s, const SolverConfig& cfg, const ModelParams& params,
           StepReport* report = nullptr);

/// As step, but the advecting velocity and the viscosity argument pass
/// through the Helmholtz filters, lambda is mollified, and the potential
/// regularization width is xi; alpha = 0 delegates to step unchanged.
State step_regularized(const State& s, const SolverConfig& cfg,
                       const ModelParams& params, double alpha, double xi,
                       StepReport* report = nullptr);

}  // namespace tflow
