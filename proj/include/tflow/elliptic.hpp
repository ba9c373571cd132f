#pragma once

#include "tflow/field.hpp"
#include "tflow/linsolve.hpp"

namespace tflow {

/// Iteration cap shared by the elliptic solves (10 per cell).
inline int default_max_iter(const Grid2D& g) { return 10 * g.nx * g.ny; }

/// Solves a(-lap)x + b x = rhs with mirror ghosts by conjugate gradients
/// (a >= 0, b >= 0, a + b > 0).  With b = 0 the rhs must have zero mean
/// and the solution comes back with zero mean.
ScalarField solve_helmholtz_neumann(const ScalarField& rhs, double a, double b,
                                    double rel_tol = 1e-10,
                                    SolveStats* stats = nullptr);

/// Componentwise a(-lap)x + b x = rhs with anti-mirror ghosts (b > 0).
VectorField solve_helmholtz_noslip(const VectorField& rhs, double a, double b,
                                   double rel_tol = 1e-10,
                                   SolveStats* stats = nullptr);

/// Helmholtz filter: solves -alpha lap g + (1+alpha) g = f; alpha = 0 is
/// the identity.  Non-expansive in both the mean-square and max norms.
ScalarField filter_scalar(const ScalarField& f, double alpha);

/// Velocity filter: `passes` (1 or 2) rounds of (1 - alpha lap)^{-1}
/// componentwise with no-slip ghosts, each followed by a projection;
/// alpha = 0 is the identity.  Non-expansive in the mean-square norm.
VectorField filter_velocity(const VectorField& v, double alpha, int passes);

struct ProjectionResult {
    VectorField u;
    ScalarField pi;  // zero mean
    SolveStats stats;
};

/// Chorin projection: solves lap pi = div(v)/dt (mirror ghosts on pi,
/// anti-mirror on v) and returns u = v - dt grad pi, discretely
/// divergence-free to the solver tolerance.
ProjectionResult project(const VectorField& v, double dt, double rel_tol = 1e-12);

}  // namespace tflow
