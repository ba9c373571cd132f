#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "tflow/field.hpp"

namespace tflow {

/// Thrown when an iterative solve fails; carries the last residual so the
/// caller can report diagnostics.
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

  private:
    double residual_;
    int iterations_;
};

struct SolveStats {
    int iterations = 0;
    double rel_residual = 0.0;
};

using ScalarOp = std::function<void(const ScalarField&, ScalarField&)>;
using VectorOp = std::function<void(const VectorField&, VectorField&)>;

/// Unpreconditioned conjugate gradients for an SPD operator, zero initial
/// guess unless warm_start; stops at ||r|| <= rel_tol ||b||.
SolveStats cg(const ScalarOp& apply, const ScalarField& rhs, ScalarField& x,
              double rel_tol, int max_iter, bool warm_start = false);
SolveStats cg(const VectorOp& apply, const VectorField& rhs, VectorField& x,
              double rel_tol, int max_iter, bool warm_start = false);

/// BiCGStab with an optional (right) preconditioner for the nonsymmetric
/// Cahn-Hilliard Jacobian; zero initial guess.
SolveStats bicgstab(const ScalarOp& apply, const ScalarOp& precond,
                    const ScalarField& rhs, ScalarField& x, double rel_tol,
                    int max_iter);

}  // namespace tflow
