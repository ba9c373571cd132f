#!/usr/bin/env python3
"""Derives the forcing terms for the manufactured verification studies.

The momentum study marches a divergence-free, no-slip velocity field

    u(x, y, t) = exp(-t) * curl(chi),   chi = 256 x^4 (1-x)^4 y^4 (1-y)^4

on the unit square with a frozen phase field phi = cos(pi x) cos(pi y) / 2,
viscosity and friction as below.  The quartic wall multiplicity makes both
velocity components vanish cubically at every wall, so the odd reflection
assumed by the anti-mirror no-slip ghosts is accurate to O(h^2); a lower
multiplicity leaves an even quadratic component at the wall and drops the
observed order to one.  The amplitude 256 normalizes max chi to about
4e-3 and max |u| to about 1e-2.

The coefficients are the viscosity nu(phi) = nu_1 (1+phi)/2 + nu_2 (1-phi)/2
and the friction g(phi) = nu(phi) (1-phi) / (2 k_star) with a constant
permeability k_star.  The pressure of the exact solution is zero, so the
forcing is

    f = du/dt + (u . grad) u - div(nu(phi) * D(u)) + g(phi) u,

with D(u) the symmetric gradient (without a factor of two, matching the
viscous operator used by the solver).  The script prints C expressions for
u and f after common subexpression elimination; the output is pasted into
src/verify.cpp.

Run:  python3 docs/manufactured_forcing.py > docs/manufactured_forcing.out
"""

import sympy as sp


def check_scalar_sources():
    """Confirms the closed-form sources hard-coded for the scalar studies.

    Heat:           phi = exp(-t) cos(pi x) cos(pi y),
                    S = phi_t - lap phi = (2 pi^2 - 1) phi.
    Cahn-Hilliard:  phi = exp(-t) cos(pi x) / 2,
                    mu = -sigma phi_xx + Psi'(phi),
                    S = phi_t - mu_xx
                      = phi (sigma pi^4 + pi^2 Psi''(phi) - 1) - Psi'''(phi) phi_x^2,
    with Psi'(s) = (theta/2) log((1+s)/(1-s)) - theta0 s.
    """
    x, y, t, sigma, theta, theta0 = sp.symbols("x y t sigma theta theta0", positive=True)

    heat = sp.exp(-t) * sp.cos(sp.pi * x) * sp.cos(sp.pi * y)
    s_heat = sp.diff(heat, t) - sp.diff(heat, x, 2) - sp.diff(heat, y, 2)
    assert sp.simplify(s_heat - (2 * sp.pi**2 - 1) * heat) == 0

    phi = sp.exp(-t) * sp.cos(sp.pi * x) / 2
    psi1 = theta / 2 * sp.log((1 + phi) / (1 - phi)) - theta0 * phi
    mu = -sigma * sp.diff(phi, x, 2) + psi1
    s_ch = sp.diff(phi, t) - sp.diff(mu, x, 2)
    psi2 = lambda s: theta / (1 - s**2) - theta0
    psi3 = lambda s: 2 * theta * s / (1 - s**2) ** 2
    closed = (phi * (sigma * sp.pi**4 + sp.pi**2 * psi2(phi) - 1)
              - psi3(phi) * sp.diff(phi, x) ** 2)
    assert sp.simplify(s_ch - closed) == 0
    print("// scalar-source closed forms verified")


def main():
    check_scalar_sources()
    x, y, t = sp.symbols("x y t")
    nu1 = sp.Integer(1)
    nu2 = sp.Rational(3, 2)
    k_star = sp.Rational(1, 2)

    chi = 256 * (x * (1 - x)) ** 4 * (y * (1 - y)) ** 4
    decay = sp.exp(-t)
    ux = decay * sp.diff(chi, y)
    uy = -decay * sp.diff(chi, x)
    assert sp.simplify(sp.diff(ux, x) + sp.diff(uy, y)) == 0

    phi = sp.cos(sp.pi * x) * sp.cos(sp.pi * y) / 2
    nu = nu1 * (1 + phi) / 2 + nu2 * (1 - phi) / 2
    g = nu * (1 - phi) / (2 * k_star)

    sxx = sp.diff(ux, x)
    syy = sp.diff(uy, y)
    sxy = (sp.diff(ux, y) + sp.diff(uy, x)) / 2

    fx = (sp.diff(ux, t) + ux * sp.diff(ux, x) + uy * sp.diff(ux, y)
          - sp.diff(nu * sxx, x) - sp.diff(nu * sxy, y) + g * ux)
    fy = (sp.diff(uy, t) + ux * sp.diff(uy, x) + uy * sp.diff(uy, y)
          - sp.diff(nu * sxy, x) - sp.diff(nu * syy, y) + g * uy)

    subexprs, reduced = sp.cse([sp.expand(ux), sp.expand(uy),
                                sp.expand(fx), sp.expand(fy)],
                               optimizations="basic")
    names = ["ux", "uy", "fx", "fy"]
    print("// generated by docs/manufactured_forcing.py")
    for sym, expr in subexprs:
        print(f"    const double {sym} = {sp.ccode(expr)};")
    for name, expr in zip(names, reduced):
        print(f"    const double {name} = {sp.ccode(expr)};")


if __name__ == "__main__":
    main()
