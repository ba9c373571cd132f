#include "tflow/linsolve.hpp"

#include <cmath>

#include "tflow/fd.hpp"

namespace tflow {

namespace {

const Grid2D& grid_of(const ScalarField& f) { return f.grid; }
const Grid2D& grid_of(const VectorField& v) { return v.grid(); }

void scale_any(ScalarField& f, double c) { scale(f, c); }
void scale_any(VectorField& v, double c) {
    scale(v.x, c);
    scale(v.y, c);
}

template <class Field, class Op>
SolveStats cg_impl(const Op& apply, const Field& rhs, Field& x, double rel_tol,
                   int max_iter, bool warm_start) {
    const Grid2D g = grid_of(rhs);
    const double bnorm = std::sqrt(dot(rhs, rhs));
    if (bnorm == 0.0) {
        x = Field(g);
        return {0, 0.0};
    }
    Field r = rhs;
    Field ap(g);
    if (warm_start) {
        require_same_grid(grid_of(x), g);
        apply(x, ap);
        add_scaled(r, -1.0, ap);
    } else {
        x = Field(g);
    }
    double rr = dot(r, r);
    if (std::sqrt(rr) <= rel_tol * bnorm) return {0, std::sqrt(rr) / bnorm};
    Field p = r;
    for (int it = 1; it <= max_iter; ++it) {
        apply(p, ap);
        const double pap = dot(p, ap);
        if (pap <= 0.0)
            throw SolverError("cg: operator not positive definite on search direction",
                              std::sqrt(rr) / bnorm, it);
        const double alpha = rr / pap;
        add_scaled(x, alpha, p);
        add_scaled(r, -alpha, ap);
        const double rr_new = dot(r, r);
        if (std::sqrt(rr_new) <= rel_tol * bnorm) return {it, std::sqrt(rr_new) / bnorm};
        scale_any(p, rr_new / rr);
        add_scaled(p, 1.0, r);
        rr = rr_new;
    }
    throw SolverError("cg: no convergence", std::sqrt(rr) / bnorm, max_iter);
}

}  // namespace

SolveStats cg(const ScalarOp& apply, const ScalarField& rhs, ScalarField& x,
              double rel_tol, int max_iter, bool warm_start) {
    return cg_impl(apply, rhs, x, rel_tol, max_iter, warm_start);
}

SolveStats cg(const VectorOp& apply, const VectorField& rhs, VectorField& x,
              double rel_tol, int max_iter, bool warm_start) {
    return cg_impl(apply, rhs, x, rel_tol, max_iter, warm_start);
}

SolveStats bicgstab(const ScalarOp& apply, const ScalarOp& precond,
                    const ScalarField& rhs, ScalarField& x, double rel_tol,
                    int max_iter) {
    const Grid2D g = rhs.grid;
    const double bnorm = std::sqrt(dot(rhs, rhs));
    x = ScalarField(g);
    if (bnorm == 0.0) return {0, 0.0};
    ScalarField r = rhs;
    ScalarField rhat = rhs;
    ScalarField p(g), v(g), s(g), t(g), phat(g), shat(g);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    double rnorm = bnorm;
    for (int it = 1; it <= max_iter; ++it) {
        const double rho_new = dot(rhat, r);
        if (rho_new == 0.0)
            throw SolverError("bicgstab: breakdown (rho = 0)", rnorm / bnorm, it);
        if (it == 1) {
            p = r;
        } else {
            const double beta = (rho_new / rho) * (alpha / omega);
            add_scaled(p, -omega, v);
            scale(p, beta);
            add_scaled(p, 1.0, r);
        }
        if (precond)
            precond(p, phat);
        else
            phat = p;
        apply(phat, v);
        const double rv = dot(rhat, v);
        if (rv == 0.0)
            throw SolverError("bicgstab: breakdown (rhat.v = 0)", rnorm / bnorm, it);
        alpha = rho_new / rv;
        s = r;
        add_scaled(s, -alpha, v);
        const double snorm = std::sqrt(dot(s, s));
        if (snorm <= rel_tol * bnorm) {
            add_scaled(x, alpha, phat);
            return {it, snorm / bnorm};
        }
        if (precond)
            precond(s, shat);
        else
            shat = s;
        apply(shat, t);
        const double tt = dot(t, t);
        if (tt == 0.0)
            throw SolverError("bicgstab: breakdown (t = 0)", snorm / bnorm, it);
        omega = dot(t, s) / tt;
        if (omega == 0.0)
            throw SolverError("bicgstab: breakdown (omega = 0)", snorm / bnorm, it);
        add_scaled(x, alpha, phat);
        add_scaled(x, omega, shat);
        r = s;
        add_scaled(r, -omega, t);
        rnorm = std::sqrt(dot(r, r));
        if (rnorm <= rel_tol * bnorm) return {it, rnorm / bnorm};
        rho = rho_new;
    }
    throw SolverError("bicgstab: no convergence", rnorm / bnorm, max_iter);
}

}  // namespace tflow
