#pragma once

#include "tflow/field.hpp"

namespace tflow {

/// All unknowns at one time level.
struct State {
    double t = 0.0;
    VectorField u;    // divergence-free to projection tolerance
    ScalarField phi;  // max|phi| < 1
    VectorField psi;
    ScalarField mu;   // diagnostic, from the latest phase solve
    ScalarField pi;   // zero mean

    State() = default;
    explicit State(const Grid2D& g) : u(g), phi(g), psi(g), mu(g), pi(g) {}
    const Grid2D& grid() const { return phi.grid; }
};

bool all_finite(const ScalarField& f);
bool all_finite(const State& s);

}  // namespace tflow
