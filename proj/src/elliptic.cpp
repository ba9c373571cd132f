#include "tflow/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tflow/fd.hpp"

namespace tflow {

ScalarField solve_helmholtz_neumann(const ScalarField& rhs, double a, double b,
                                    double rel_tol, SolveStats* stats) {
    if (a < 0.0 || b < 0.0 || a + b == 0.0)
        throw std::invalid_argument("helmholtz: needs a >= 0, b >= 0, a + b > 0");
    const bool singular = (b == 0.0);
    if (singular) {
        const double ref = norm_linf(rhs);
        if (ref > 0.0 && std::abs(mean(rhs)) > 1e-10 * ref)
            throw std::invalid_argument("helmholtz: rhs has nonzero mean with b = 0");
    }
    auto apply = [a, b](const ScalarField& in, ScalarField& out) {
        out = laplace_neumann(in);
        scale(out, -a);
        add_scaled(out, b, in);
    };
    ScalarField x;
    const SolveStats st = cg(apply, rhs, x, rel_tol, default_max_iter(rhs.grid));
    if (stats) *stats = st;
    if (singular) shift(x, -mean(x));
    return x;
}

VectorField solve_helmholtz_noslip(const VectorField& rhs, double a, double b,
                                   double rel_tol, SolveStats* stats) {
    if (a < 0.0 || b <= 0.0)
        throw std::invalid_argument("helmholtz: needs a >= 0, b > 0");
    auto apply = [a, b](const VectorField& in, VectorField& out) {
        out = laplace_noslip(in);
        scale(out.x, -a);
        scale(out.y, -a);
        add_scaled(out, b, in);
    };
    VectorField x;
    const SolveStats st = cg(apply, rhs, x, rel_tol, default_max_iter(rhs.grid()));
    if (stats) *stats = st;
    return x;
}

ScalarField filter_scalar(const ScalarField& f, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("filter: alpha must be >= 0");
    if (alpha == 0.0) return f;
    return solve_helmholtz_neumann(f, alpha, 1.0 + alpha, 1e-12);
}

VectorField filter_velocity(const VectorField& v, double alpha, int passes) {
    if (alpha < 0.0) throw std::invalid_argument("filter: alpha must be >= 0");
    if (passes != 1 && passes != 2)
        throw std::invalid_argument("filter: passes must be 1 or 2");
    if (alpha == 0.0) return v;
    VectorField u = v;
    for (int p = 0; p < passes; ++p) {
        u = solve_helmholtz_noslip(u, alpha, 1.0, 1e-12);
        u = project(u, 1.0).u;
    }
    return u;
}

ProjectionResult project(const VectorField& v, double dt, double rel_tol) {
    if (dt <= 0.0) throw std::invalid_argument("project: dt must be > 0");
    ScalarField rhs = div(v, Bc::noslip);
    scale(rhs, -1.0);
    // the discrete divergence integrates to zero exactly, but its computed
    // mean carries rounding; left in place it is an inconsistent component
    // the iteration can never remove
    shift(rhs, -mean(rhs));
    auto apply = [](const ScalarField& in, ScalarField& out) {
        out = div(grad(in, Bc::neumann), Bc::noslip);
        scale(out, -1.0);
    };
    // when v is nearly divergence-free the rhs sits at the rounding level
    // of its own evaluation; cap the requested reduction there or cg chases
    // a target below arithmetic
    const double floor_abs = 16.0 * std::numeric_limits<double>::epsilon() *
                             norm_l2(v) / std::min(v.grid().dx, v.grid().dy);
    const double bnorm = norm_l2(rhs);
    const double eff_tol =
        bnorm > 0.0 ? std::max(rel_tol, floor_abs / bnorm) : rel_tol;
    ProjectionResult res;
    ScalarField q;
    res.stats = cg(apply, rhs, q, eff_tol, default_max_iter(v.grid()));
    shift(q, -mean(q));
    VectorField gq = grad(q, Bc::neumann);
    res.u = v;
    add_scaled(res.u, -1.0, gq);
    res.pi = q;
    scale(res.pi, 1.0 / dt);
    return res;
}

}  // namespace tflow
