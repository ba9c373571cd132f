#include "tflow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tflow {

namespace {

struct Stencil {
    int i0, j0;
    double tx, ty;
};

Stencil from_index_space(const Grid2D& g, double rx, double ry) {
    Stencil s;
    s.i0 = static_cast<int>(std::floor(rx));
    s.j0 = static_cast<int>(std::floor(ry));
    s.i0 = std::clamp(s.i0, -1, g.nx - 1);
    s.j0 = std::clamp(s.j0, -1, g.ny - 1);
    s.tx = std::clamp(rx - s.i0, 0.0, 1.0);
    s.ty = std::clamp(ry - s.j0, 0.0, 1.0);
    return s;
}

Stencil locate(const Grid2D& g, double x, double y) {
    return from_index_space(g, x / g.dx - 0.5, y / g.dy - 0.5);
}

double gather(const ScalarField& f, const Stencil& s, Bc bc) {
    if (s.tx == 0.0 && s.ty == 0.0 && s.i0 >= 0 && s.j0 >= 0)
        return f(s.i0, s.j0);
    const double v00 = at_bc(f, s.i0, s.j0, bc);
    const double v10 = at_bc(f, s.i0 + 1, s.j0, bc);
    const double v01 = at_bc(f, s.i0, s.j0 + 1, bc);
    const double v11 = at_bc(f, s.i0 + 1, s.j0 + 1, bc);
    const double lo = (1.0 - s.ty) * ((1.0 - s.tx) * v00 + s.tx * v10);
    const double hi = s.ty * ((1.0 - s.tx) * v01 + s.tx * v11);
    return lo + hi;
}

/// Extrapolation-ghost sample clamped to the interior cells of the stencil.
double gather_clamped(const ScalarField& f, const Stencil& s) {
    double val = gather(f, s, Bc::extrap);
    const int nx = f.grid.nx, ny = f.grid.ny;
    double lo = val, hi = val;
    bool any = false;
    for (int dj = 0; dj <= 1; ++dj)
        for (int di = 0; di <= 1; ++di) {
            const int i = s.i0 + di, j = s.j0 + dj;
            if (i < 0 || i >= nx || j < 0 || j >= ny) continue;
            const double v = f(i, j);
            if (!any) {
                lo = hi = v;
                any = true;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    return std::clamp(val, lo, hi);
}

}  // namespace

double interp_bilinear(const ScalarField& f, double x, double y, Bc bc) {
    return gather(f, locate(f.grid, x, y), bc);
}

FlowMapStep backtrack(const VectorField& u, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("backtrack: dt must be > 0");
    const Grid2D& g = u.grid();
    FlowMapStep map(g);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = g.idx(i, j);
            const double x = g.x(i), y = g.y(j);
            const double k1x = u.x(i, j), k1y = u.y(i, j);
            double xm = std::clamp(x - 0.5 * dt * k1x, 0.0, g.lx);
            double ym = std::clamp(y - 0.5 * dt * k1y, 0.0, g.ly);
            const Stencil sm = locate(g, xm, ym);
            const double k2x = gather(u.x, sm, Bc::noslip);
            const double k2y = gather(u.y, sm, Bc::noslip);
            // index-space departure keeps a zero displacement exact
            const double rx = std::clamp(i - dt * k2x / g.dx, -0.5, g.nx - 0.5);
            const double ry = std::clamp(j - dt * k2y / g.dy, -0.5, g.ny - 0.5);
            map.xd[k] = (rx + 0.5) * g.dx;
            map.yd[k] = (ry + 0.5) * g.dy;
            const Stencil sd = from_index_space(g, rx, ry);
            map.ix[k] = sd.i0;
            map.iy[k] = sd.j0;
            map.tx[k] = sd.tx;
            map.ty[k] = sd.ty;
        }
    return map;
}

VectorField advect_psi(const VectorField& psi, const FlowMapStep& map) {
    require_same_grid(psi.grid(), map.grid);
    const Grid2D& g = map.grid;
    VectorField out(g);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = g.idx(i, j);
            const Stencil s{map.ix[k], map.iy[k], map.tx[k], map.ty[k]};
            out.x(i, j) = gather_clamped(psi.x, s);
            out.y(i, j) = gather_clamped(psi.y, s);
        }
    return out;
}

VectorField advect_psi_eulerian(const VectorField& psi, const VectorField& u,
                                double dt) {
    require_same_grid(psi.grid(), u.grid());
    if (dt <= 0.0) throw std::invalid_argument("advect: dt must be > 0");
    const Grid2D& g = psi.grid();
    double cfl = 0.0;
#pragma omp parallel for schedule(static) reduction(max : cfl)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double cx = std::abs(u.x(i, j)) / g.dx;
            const double cy = std::abs(u.y(i, j)) / g.dy;
            cfl = std::max(cfl, std::max(cx, cy));
        }
    if (dt * cfl > 0.5 + 1e-12)
        throw std::invalid_argument("advect: CFL exceeds 1/2");

    VectorField out(g);
    // ghost values mirror the boundary cell so the update stays a convex
    // combination of nearby cells, then the clamp makes that exact
    auto upd = [&](const ScalarField& f, ScalarField& o) {
#pragma omp parallel for schedule(static)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double c = f(i, j);
                const double w = at_bc(f, i - 1, j, Bc::neumann);
                const double e = at_bc(f, i + 1, j, Bc::neumann);
                const double s = at_bc(f, i, j - 1, Bc::neumann);
                const double n = at_bc(f, i, j + 1, Bc::neumann);
                const double ux = u.x(i, j), uy = u.y(i, j);
                double v = c;
                v -= dt * (std::max(ux, 0.0) * (c - w) + std::min(ux, 0.0) * (e - c)) / g.dx;
                v -= dt * (std::max(uy, 0.0) * (c - s) + std::min(uy, 0.0) * (n - c)) / g.dy;
                const double lo = std::min({c, w, e, s, n});
                const double hi = std::max({c, w, e, s, n});
                o(i, j) = std::clamp(v, lo, hi);
            }
    };
    upd(psi.x, out.x);
    upd(psi.y, out.y);
    return out;
}

MapJacobianRange map_jacobian_range(const FlowMapStep& map) {
    const Grid2D& g = map.grid;
    MapJacobianRange r{1e300, -1e300};
    double mn = 1e300, mx = -1e300;
#pragma omp parallel for schedule(static) reduction(min : mn) reduction(max : mx)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int iw = std::max(i - 1, 0), ie = std::min(i + 1, g.nx - 1);
            const int js = std::max(j - 1, 0), jn = std::min(j + 1, g.ny - 1);
            const double hx = (ie - iw) * g.dx, hy = (jn - js) * g.dy;
            const double axx = (map.xd[g.idx(ie, j)] - map.xd[g.idx(iw, j)]) / hx;
            const double axy = (map.xd[g.idx(i, jn)] - map.xd[g.idx(i, js)]) / hy;
            const double ayx = (map.yd[g.idx(ie, j)] - map.yd[g.idx(iw, j)]) / hx;
            const double ayy = (map.yd[g.idx(i, jn)] - map.yd[g.idx(i, js)]) / hy;
            const double det = axx * ayy - axy * ayx;
            mn = std::min(mn, det);
            mx = std::max(mx, det);
        }
    r.min_det = mn;
    r.max_det = mx;
    return r;
}

}  // namespace tflow
