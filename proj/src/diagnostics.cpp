#include "tflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tflow/fd.hpp"
#include "tflow/reduce.hpp"
#include "tflow/stepper.hpp"

namespace tflow {

double grad_energy_neumann(const ScalarField& f) {
    const Grid2D& g = f.grid;
    const double ix = 1.0 / g.dx, iy = 1.0 / g.dy;
    const double s = det_sum_cells(g, [&](int i, int j) {
        double acc = 0.0;
        if (i + 1 < g.nx) {
            const double d = (f(i + 1, j) - f(i, j)) * ix;
            acc += d * d;
        }
        if (j + 1 < g.ny) {
            const double d = (f(i, j + 1) - f(i, j)) * iy;
            acc += d * d;
        }
        return acc;
    });
    return s * g.cell_area();
}

EnergyReport energy(const State& s, const ModelParams& params) {
    const Grid2D& g = s.grid();
    const double da = g.cell_area();
    EnergyReport r;
    r.t = s.t;

    r.e_kin = 0.5 * da *
              det_sum_cells(g, [&](int i, int j) {
                  return s.u.x(i, j) * s.u.x(i, j) + s.u.y(i, j) * s.u.y(i, j);
              });

    r.e_coh = 0.5 * params.coef.sigma * grad_energy_neumann(s.phi) +
              da * det_sum_cells(g, [&](int i, int j) {
                  return psi_xi_value(s.phi(i, j), params.pot);
              });

    const ScalarField gp2 = grad_psi_squared(s.psi);
    r.e_ela = 0.5 * da *
              det_sum_cells(g, [&](int i, int j) {
                  return lambda_of(s.phi(i, j), params.coef) * gp2(i, j);
              });

    r.e_total = r.e_kin + r.e_coh + r.e_ela;

    ScalarField nu_field(g);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < nu_field.a.size(); ++k)
        nu_field.a[k] = nu_of(s.phi.a[k], params.coef);
    const ScalarField visc = viscous_dissipation_density(s.u, nu_field);
    r.dissipation = da * det_sum_cells(g, [&](int i, int j) {
        const double ph = std::clamp(s.phi(i, j), -1.0, 1.0);
        const double u2 = s.u.x(i, j) * s.u.x(i, j) + s.u.y(i, j) * s.u.y(i, j);
        return visc(i, j) + darcy_coefficient(ph, params.coef) * u2;
    });
    r.dissipation += grad_energy_neumann(s.mu);

    r.mass = mean(s.phi);
    r.max_abs_phi = norm_linf(s.phi);
    r.separation_margin = 1.0 - r.max_abs_phi;

    const double un = norm_l2(s.u);
    r.div_residual =
        un > 0.0 ? norm_l2(div(s.u, Bc::noslip)) * std::min(g.dx, g.dy) / un : 0.0;
    return r;
}

double energy_residual_between(const EnergyReport& prev, const EnergyReport& next) {
    const double dt = next.t - prev.t;
    return (next.e_total - prev.e_total) / dt + next.dissipation;
}

namespace {

void check_finite(const ScalarField& f, const char* name,
                  std::vector<Violation>& out) {
    for (std::size_t k = 0; k < f.a.size(); ++k)
        if (!std::isfinite(f.a[k])) {
            const int i = static_cast<int>(k) % f.grid.nx;
            const int j = static_cast<int>(k) / f.grid.nx;
            std::ostringstream os;
            os << name << " not finite at cell (" << i << ", " << j << ")";
            out.push_back({"finite-values", os.str()});
            return;
        }
}

}  // namespace

std::vector<Violation> validate(const State& s, const ModelParams& params,
                                const ValidationTolerances& tol,
                                const EnergyReport* previous) {
    std::vector<Violation> out;
    check_finite(s.u.x, "u_x", out);
    check_finite(s.u.y, "u_y", out);
    check_finite(s.phi, "phi", out);
    check_finite(s.psi.x, "psi_x", out);
    check_finite(s.psi.y, "psi_y", out);
    check_finite(s.mu, "mu", out);
    check_finite(s.pi, "pi", out);
    if (!out.empty()) return out;

    const Grid2D& g = s.grid();
    double worst = 0.0;
    int wi = 0, wj = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double v = std::abs(s.phi(i, j));
            if (v > worst) {
                worst = v;
                wi = i;
                wj = j;
            }
        }
    if (worst > tol.phase_bound) {
        std::ostringstream os;
        os << "max|phi| = " << worst << " > " << tol.phase_bound << " at cell (" << wi
           << ", " << wj << ")";
        out.push_back({"phase-bound", os.str()});
    }

    const double un = norm_l2(s.u);
    if (un > 0.0) {
        const double dr = norm_l2(div(s.u, Bc::noslip)) * std::min(g.dx, g.dy) / un;
        if (dr > tol.div_tol) {
            std::ostringstream os;
            os << "relative divergence " << dr << " > " << tol.div_tol;
            out.push_back({"divergence", os.str()});
        }
    }

    const double pm = std::abs(mean(s.pi));
    const double pref = std::max(1.0, norm_linf(s.pi));
    if (pm > tol.pi_mean_tol * pref) {
        std::ostringstream os;
        os << "mean(pi) = " << pm << " exceeds " << tol.pi_mean_tol << " x scale";
        out.push_back({"pi-mean", os.str()});
    }

    if (previous) {
        const EnergyReport cur = energy(s, params);
        if (cur.e_total > previous->e_total + tol.energy_slack) {
            std::ostringstream os;
            os << "e_total rose from " << previous->e_total << " to " << cur.e_total
               << " (slack " << tol.energy_slack << ")";
            out.push_back({"energy", os.str()});
        }
    }
    return out;
}

}  // namespace tflow
