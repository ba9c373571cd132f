#include "tflow/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tflow/dct.hpp"
#include "tflow/elliptic.hpp"
#include "tflow/fd.hpp"
#include "tflow/transport.hpp"
#include "tflow/verify.hpp"

namespace tflow {

void SolverConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("solver: dt must be > 0");
    if (!(newton_tol > 0.0)) throw std::invalid_argument("solver: newton_tol must be > 0");
    if (newton_max < 1) throw std::invalid_argument("solver: newton_max must be >= 1");
    if (alpha_filter < 0.0) throw std::invalid_argument("solver: alpha_filter must be >= 0");
}

ScalarField grad_psi_squared(const VectorField& psi) {
    const ScalarField axx = ddx(psi.x, Bc::extrap);
    const ScalarField axy = ddy(psi.x, Bc::extrap);
    const ScalarField ayx = ddx(psi.y, Bc::extrap);
    const ScalarField ayy = ddy(psi.y, Bc::extrap);
    ScalarField out(psi.grid());
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < out.a.size(); ++k)
        out.a[k] = axx.a[k] * axx.a[k] + axy.a[k] * axy.a[k] +
                   ayx.a[k] * ayx.a[k] + ayy.a[k] * ayy.a[k];
    return out;
}

namespace {

ScalarField chemical_potential_with(const ScalarField& phi, const VectorField& psi,
                                    const ModelParams& params, const Coefficient& lam) {
    require_same_grid(phi.grid, psi.grid());
    const ScalarField lap = laplace_neumann(phi);
    const ScalarField gp2 = grad_psi_squared(psi);
    ScalarField out(phi.grid);
    const double sigma = params.coef.sigma;
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < out.a.size(); ++k)
        out.a[k] = -sigma * lap.a[k] + psi_xi_prime(phi.a[k], params.pot) +
                   0.5 * lam.prime(phi.a[k]) * gp2.a[k];
    return out;
}

VectorField momentum_forcing_with(const ScalarField& phi, const ScalarField& mu,
                                  const VectorField& psi, const ModelParams& params,
                                  ForcingForm form, const Coefficient& lam) {
    const Grid2D& g = phi.grid;
    const ScalarField axx = ddx(psi.x, Bc::extrap);
    const ScalarField axy = ddy(psi.x, Bc::extrap);
    const ScalarField ayx = ddx(psi.y, Bc::extrap);
    const ScalarField ayy = ddy(psi.y, Bc::extrap);
    ScalarField lamf(g);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < lamf.a.size(); ++k)
        lamf.a[k] = lam.value(phi.a[k]);

    VectorField out(g);
    if (form == ForcingForm::potential) {
        const VectorField gphi = grad(phi, Bc::neumann);
        VectorField rx(g), ry(g);
#pragma omp parallel for schedule(static)
        for (std::size_t k = 0; k < lamf.a.size(); ++k) {
            rx.x.a[k] = lamf.a[k] * axx.a[k];
            rx.y.a[k] = lamf.a[k] * axy.a[k];
            ry.x.a[k] = lamf.a[k] * ayx.a[k];
            ry.y.a[k] = lamf.a[k] * ayy.a[k];
        }
        const ScalarField wx = div(rx, Bc::extrap);
        const ScalarField wy = div(ry, Bc::extrap);
#pragma omp parallel for schedule(static)
        for (std::size_t k = 0; k < out.x.a.size(); ++k) {
            out.x.a[k] = mu.a[k] * gphi.x.a[k] -
                         (axx.a[k] * wx.a[k] + ayx.a[k] * wy.a[k]);
            out.y.a[k] = mu.a[k] * gphi.y.a[k] -
                         (axy.a[k] * wx.a[k] + ayy.a[k] * wy.a[k]);
        }
        return out;
    }

    // divergence form, computed literally
    const double sigma = params.coef.sigma;
    const VectorField gphi = grad(phi, Bc::neumann);
    VectorField ex(g), ey(g), kx(g), ky(g);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < lamf.a.size(); ++k) {
        const double l = lamf.a[k];
        ex.x.a[k] = l * (axx.a[k] * axx.a[k] + ayx.a[k] * ayx.a[k]);
        ex.y.a[k] = l * (axx.a[k] * axy.a[k] + ayx.a[k] * ayy.a[k]);
        ey.x.a[k] = ex.y.a[k];
        ey.y.a[k] = l * (axy.a[k] * axy.a[k] + ayy.a[k] * ayy.a[k]);
        kx.x.a[k] = sigma * gphi.x.a[k] * gphi.x.a[k];
        kx.y.a[k] = sigma * gphi.x.a[k] * gphi.y.a[k];
        ky.x.a[k] = kx.y.a[k];
        ky.y.a[k] = sigma * gphi.y.a[k] * gphi.y.a[k];
    }
    const ScalarField dex = div(ex, Bc::extrap);
    const ScalarField dey = div(ey, Bc::extrap);
    const ScalarField dkx = div(kx, Bc::neumann);
    const ScalarField dky = div(ky, Bc::neumann);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < out.x.a.size(); ++k) {
        out.x.a[k] = -dex.a[k] - dkx.a[k];
        out.y.a[k] = -dey.a[k] - dky.a[k];
    }
    return out;
}

}  // namespace

ScalarField chemical_potential(const ScalarField& phi, const VectorField& psi,
                               const ModelParams& params) {
    return chemical_potential_with(phi, psi, params, affine_lambda(params.coef));
}

VectorField momentum_forcing(const ScalarField& phi, const ScalarField& mu,
                             const VectorField& psi, const ModelParams& params,
                             ForcingForm form) {
    return momentum_forcing_with(phi, mu, psi, params, form, affine_lambda(params.coef));
}

ScalarField advect_phi_skew(const VectorField& v, const ScalarField& f) {
    require_same_grid(v.grid(), f.grid);
    const Grid2D& g = f.grid;
    const ScalarField gx = ddx(f, Bc::neumann);
    const ScalarField gy = ddy(f, Bc::neumann);
    VectorField flux(g);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < f.a.size(); ++k) {
        flux.x.a[k] = v.x.a[k] * f.a[k];
        flux.y.a[k] = v.y.a[k] * f.a[k];
    }
    const ScalarField dflux = div(flux, Bc::noslip);
    ScalarField out(g);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < out.a.size(); ++k)
        out.a[k] = 0.5 * (v.x.a[k] * gx.a[k] + v.y.a[k] * gy.a[k] + dflux.a[k]);
    return out;
}

VectorField convect_skew(const VectorField& v, const VectorField& w) {
    require_same_grid(v.grid(), w.grid());
    const Grid2D& g = w.grid();
    VectorField out(g);
    auto component = [&](const ScalarField& wc, ScalarField& oc) {
        const ScalarField gx = ddx(wc, Bc::noslip);
        const ScalarField gy = ddy(wc, Bc::noslip);
        VectorField flux(g);
#pragma omp parallel for schedule(static)
        for (std::size_t k = 0; k < wc.a.size(); ++k) {
            flux.x.a[k] = v.x.a[k] * wc.a[k];
            flux.y.a[k] = v.y.a[k] * wc.a[k];
        }
        const ScalarField dflux = div(flux, Bc::neumann);
#pragma omp parallel for schedule(static)
        for (std::size_t k = 0; k < oc.a.size(); ++k)
            oc.a[k] = 0.5 * (v.x.a[k] * gx.a[k] + v.y.a[k] * gy.a[k] + dflux.a[k]);
    };
    component(w.x, out.x);
    component(w.y, out.y);
    return out;
}

VectorField viscous_operator(const VectorField& u, const ScalarField& nu) {
    require_same_grid(u.grid(), nu.grid);
    const Grid2D& g = nu.grid;
    const ScalarField sxx = ddx(u.x, Bc::noslip);
    const ScalarField syy = ddy(u.y, Bc::noslip);
    const ScalarField dyux = ddy(u.x, Bc::noslip);
    const ScalarField dxuy = ddx(u.y, Bc::noslip);
    VectorField rowx(g), rowy(g);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < nu.a.size(); ++k) {
        const double sxy = 0.5 * (dyux.a[k] + dxuy.a[k]);
        rowx.x.a[k] = nu.a[k] * sxx.a[k];
        rowx.y.a[k] = nu.a[k] * sxy;
        rowy.x.a[k] = rowx.y.a[k];
        rowy.y.a[k] = nu.a[k] * syy.a[k];
    }
    VectorField out(g);
    const ScalarField dx_ = div(rowx, Bc::neumann);
    const ScalarField dy_ = div(rowy, Bc::neumann);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < out.x.a.size(); ++k) {
        out.x.a[k] = -dx_.a[k];
        out.y.a[k] = -dy_.a[k];
    }
    return out;
}

ScalarField viscous_dissipation_density(const VectorField& u, const ScalarField& nu) {
    require_same_grid(u.grid(), nu.grid);
    const ScalarField sxx = ddx(u.x, Bc::noslip);
    const ScalarField syy = ddy(u.y, Bc::noslip);
    const ScalarField dyux = ddy(u.x, Bc::noslip);
    const ScalarField dxuy = ddx(u.y, Bc::noslip);
    ScalarField out(nu.grid);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < out.a.size(); ++k) {
        const double sxy = 0.5 * (dyux.a[k] + dxuy.a[k]);
        out.a[k] = nu.a[k] * (sxx.a[k] * sxx.a[k] + syy.a[k] * syy.a[k] +
                              2.0 * sxy * sxy);
    }
    return out;
}

ChStepResult cahn_hilliard_step(const ScalarField& phi_n, const VectorField& v_adv,
                                const ScalarField& elastic_term,
                                const ScalarField* source, const SolverConfig& cfg,
                                const ModelParams& params) {
    const Grid2D& g = phi_n.grid;
    const double dt = cfg.dt;
    const double sigma = params.coef.sigma;
    const double theta0 = params.pot.theta0;
    const PotentialParams& pot = params.pot;

    const ScalarField adv = advect_phi_skew(v_adv, phi_n);

    // explicit part of mu: concave split term at phi_n plus elastic load
    ScalarField base(g);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < base.a.size(); ++k) {
        base.a[k] = -theta0 * phi_n.a[k] + elastic_term.a[k];
    }

    double mean_target = mean(phi_n) - dt * mean(adv);
    ScalarField expl = adv;
    if (source) {
        require_same_grid(source->grid, g);
        add_scaled(expl, -1.0, *source);
        mean_target += dt * mean(*source);
    }

    auto mu_of = [&](const ScalarField& phi) {
        ScalarField m = laplace_neumann(phi);
#pragma omp parallel for schedule(static)
        for (std::size_t k = 0; k < m.a.size(); ++k)
            m.a[k] = -sigma * m.a[k] + f_xi(phi.a[k], pot, 1) + base.a[k];
        return m;
    };
    auto residual_of = [&](const ScalarField& phi) {
        const ScalarField lap_mu = laplace_neumann(mu_of(phi));
        ScalarField r(g);
#pragma omp parallel for schedule(static)
        for (std::size_t k = 0; k < r.a.size(); ++k)
            r.a[k] = (phi.a[k] - phi_n.a[k]) / dt + expl.a[k] - lap_mu.a[k];
        return r;
    };

    ChStepResult res;
    ScalarField phi = phi_n;
    shift(phi, mean_target - mean(phi));
    ScalarField r = residual_of(phi);
    double rn = norm_l2(r);

    const CosineSolver cosine(g);
    for (int it = 0; it < cfg.newton_max && rn > cfg.newton_tol; ++it) {
        ScalarField curv(g);
        double cmin = 1e300, cmax = -1e300;
#pragma omp parallel for schedule(static) reduction(min : cmin) reduction(max : cmax)
        for (std::size_t k = 0; k < curv.a.size(); ++k) {
            curv.a[k] = f_xi(phi.a[k], pot, 2);
            cmin = std::min(cmin, curv.a[k]);
            cmax = std::max(cmax, curv.a[k]);
        }
        const double cbar = 0.5 * (cmin + cmax);
        auto jac = [&](const ScalarField& v, ScalarField& out) {
            ScalarField inner = laplace_neumann(v);
#pragma omp parallel for schedule(static)
            for (std::size_t k = 0; k < inner.a.size(); ++k)
                inner.a[k] = -sigma * inner.a[k] + curv.a[k] * v.a[k];
            out = laplace_neumann(inner);
#pragma omp parallel for schedule(static)
            for (std::size_t k = 0; k < out.a.size(); ++k)
                out.a[k] = v.a[k] / dt - out.a[k];
        };
        auto precond = [&](const ScalarField& in, ScalarField& out) {
            cosine.solve(1.0 / dt, cbar, sigma, in, out);
        };
        ScalarField rhs = r;
        scale(rhs, -1.0);
        ScalarField delta;
        const SolveStats st = bicgstab(jac, precond, rhs, delta, 1e-12, 2000);
        res.linear_iters += st.iterations;

        double stepsize = 1.0;
        bool accepted = false;
        for (int h = 0; h < 60; ++h) {
            ScalarField trial = phi;
            add_scaled(trial, stepsize, delta);
            shift(trial, mean_target - mean(trial));
            if (norm_linf(trial) <= 1.0 - 1e-12) {
                ScalarField rt = residual_of(trial);
                const double rtn = norm_l2(rt);
                if (rtn < rn) {
                    phi = trial;
                    r = rt;
                    rn = rtn;
                    accepted = true;
                    break;
                }
            }
            stepsize *= 0.5;
        }
        ++res.newton_iters;
        if (!accepted)
            throw SolverError("cahn-hilliard newton: line search failed", rn,
                              res.newton_iters);
    }
    if (rn > cfg.newton_tol)
        throw SolverError("cahn-hilliard newton: no convergence", rn, res.newton_iters);

    res.residual = rn;
    res.mu = mu_of(phi);
    res.phi = phi;
    return res;
}

MomentumResult momentum_step(const VectorField& u_n, const VectorField& v_adv,
                             const ScalarField& nu_field, const ScalarField& darcy_field,
                             const VectorField& forcing, double dt, double rel_tol) {
    const Grid2D& g = u_n.grid();
    const VectorField conv = convect_skew(v_adv, u_n);
    VectorField rhs(g);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < rhs.x.a.size(); ++k) {
        rhs.x.a[k] = u_n.x.a[k] / dt - conv.x.a[k] + forcing.x.a[k];
        rhs.y.a[k] = u_n.y.a[k] / dt - conv.y.a[k] + forcing.y.a[k];
    }
    auto op = [&](const VectorField& v, VectorField& out) {
        out = viscous_operator(v, nu_field);
#pragma omp parallel for schedule(static)
        for (std::size_t k = 0; k < out.x.a.size(); ++k) {
            out.x.a[k] += v.x.a[k] / dt + darcy_field.a[k] * v.x.a[k];
            out.y.a[k] += v.y.a[k] / dt + darcy_field.a[k] * v.y.a[k];
        }
    };
    MomentumResult res;
    VectorField ustar;
    const SolveStats st = cg(op, rhs, ustar, rel_tol, default_max_iter(g));
    res.solve_iters = st.iterations;
    ProjectionResult pr = project(ustar, dt, rel_tol);
    res.proj_iters = pr.stats.iterations;
    res.u = std::move(pr.u);
    res.pi = std::move(pr.pi);
    return res;
}

namespace {

struct StepHooks {
    std::function<VectorField(const VectorField&)> advect_velocity;
    std::function<ScalarField(const ScalarField&)> coef_argument;
    Coefficient lambda;
};

State step_impl(const State& s, const SolverConfig& cfg, const ModelParams& params,
                const StepHooks& hooks, StepReport* report) {
    cfg.validate();
    params.validate();
    const Grid2D& g = s.grid();
    const double dt = cfg.dt;
    StepReport rep;

    const VectorField v_adv =
        hooks.advect_velocity ? hooks.advect_velocity(s.u) : s.u;

    double cflmax = 0.0;
#pragma omp parallel for schedule(static) reduction(max : cflmax)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double cx = std::abs(v_adv.x(i, j)) / g.dx;
            const double cy = std::abs(v_adv.y(i, j)) / g.dy;
            cflmax = std::max(cflmax, std::max(cx, cy));
        }
    rep.cfl = dt * cflmax;
    rep.cfl_advisory = rep.cfl > 1.0;

    // (1) transport of the vector potential
    const FlowMapStep map = backtrack(v_adv, dt);
    const MapJacobianRange jr = map_jacobian_range(map);
    rep.map_det_min = jr.min_det;
    rep.map_det_max = jr.max_det;
    VectorField psi1 = advect_psi(s.psi, map);

    // (2) phase and chemical potential
    const ScalarField gp2 = grad_psi_squared(psi1);
    ScalarField elastic(g);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < elastic.a.size(); ++k)
        elastic.a[k] = 0.5 * hooks.lambda.prime(s.phi.a[k]) * gp2.a[k];
    ChStepResult ch =
        cahn_hilliard_step(s.phi, v_adv, elastic, nullptr, cfg, params);
    rep.newton_iters = ch.newton_iters;
    rep.newton_residual = ch.residual;
    rep.ch_linear_iters = ch.linear_iters;

    // (3) momentum and projection
    const ScalarField phi_arg =
        hooks.coef_argument ? hooks.coef_argument(ch.phi) : ch.phi;
    ScalarField nu_field(g), darcy_field(g);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < nu_field.a.size(); ++k) {
        nu_field.a[k] = nu_of(phi_arg.a[k], params.coef);
        darcy_field.a[k] = darcy_coefficient(ch.phi.a[k], params.coef);
    }
    const ForcingForm form = cfg.use_potential_form_forcing ? ForcingForm::potential
                                                            : ForcingForm::divergence;
    const VectorField forcing =
        momentum_forcing_with(ch.phi, ch.mu, psi1, params, form, hooks.lambda);
    MomentumResult mom = momentum_step(s.u, v_adv, nu_field, darcy_field, forcing, dt);
    rep.momentum_iters = mom.solve_iters;
    rep.projection_iters = mom.proj_iters;

    State out(g);
    out.t = s.t + dt;
    out.u = std::move(mom.u);
    out.pi = std::move(mom.pi);
    out.phi = std::move(ch.phi);
    out.mu = std::move(ch.mu);
    out.psi = std::move(psi1);
    if (report) *report = rep;
    return out;
}

}  // namespace

State step(const State& s, const SolverConfig& cfg, const ModelParams& params,
           StepReport* report) {
    if (cfg.scheme == Scheme::explicit_reference)
        return explicit_reference_step(s, cfg.dt, params);
    if (cfg.alpha_filter != 0.0)
        return step_regularized(s, cfg, params, cfg.alpha_filter, params.pot.xi, report);
    StepHooks hooks;
    hooks.lambda = affine_lambda(params.coef);
    return step_impl(s, cfg, params, hooks, report);
}

State step_regularized(const State& s, const SolverConfig& cfg,
                       const ModelParams& params, double alpha, double xi,
                       StepReport* report) {
    if (alpha < 0.0) throw std::invalid_argument("step: alpha must be >= 0");
    ModelParams p2 = params;
    p2.pot.xi = xi;
    SolverConfig c2 = cfg;
    c2.alpha_filter = 0.0;
    if (alpha == 0.0) return step(s, c2, p2, report);
    StepHooks hooks;
    hooks.advect_velocity = [alpha](const VectorField& u) {
        return filter_velocity(u, alpha, 2);
    };
    hooks.coef_argument = [alpha](const ScalarField& f) {
        return filter_scalar(f, alpha);
    };
    hooks.lambda = mollify_lambda(affine_lambda(p2.coef), alpha);
    return step_impl(s, c2, p2, hooks, report);
}

}  // namespace tflow
