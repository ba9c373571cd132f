#include <cmath>
#include <limits>

#include "doctest.h"
#include "support/testutil.hpp"
#include "tflow/diagnostics.hpp"
#include "tflow/fd.hpp"
#include "tflow/stepper.hpp"

using namespace tflow;

TEST_CASE("the zero state reports zero energy and full margins") {
    const Grid2D g(16, 16, 1.0, 1.0);
    ModelParams params;
    const State s(g);
    const EnergyReport r = energy(s, params);
    CHECK(r.e_kin == 0.0);
    CHECK(r.e_coh == 0.0);
    CHECK(r.e_ela == 0.0);
    CHECK(r.e_total == 0.0);
    CHECK(r.mass == 0.0);
    CHECK(r.max_abs_phi == 0.0);
    CHECK(r.separation_margin == 1.0);
    CHECK(r.div_residual == 0.0);
}

TEST_CASE("energies of hand-built states match closed forms") {
    const Grid2D g(32, 32, 1.0, 1.0);
    ModelParams params;
    State s(g);
    for (double& e : s.u.x.a) e = 2.0;
    for (double& e : s.phi.a) e = 0.5;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) s.psi.x(i, j) = 0.7 * g.x(i);

    const EnergyReport r = energy(s, params);
    CHECK(r.e_kin == doctest::Approx(2.0).epsilon(1e-13));
    // uniform phi has no gradient energy, only the potential well depth
    CHECK(r.e_coh == doctest::Approx(psi_xi_value(0.5, params.pot)).epsilon(1e-13));
    // linear psi has |grad psi|^2 = 0.49 everywhere, extrapolated exactly
    CHECK(r.e_ela ==
          doctest::Approx(0.5 * lambda_of(0.5, params.coef) * 0.49).epsilon(1e-12));
    CHECK(r.e_total == doctest::Approx(r.e_kin + r.e_coh + r.e_ela).epsilon(1e-15));
    CHECK(r.mass == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.max_abs_phi == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.separation_margin == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.dissipation >= 0.0);
}

TEST_CASE("gradient energy pairs with the five-point laplacian") {
    const Grid2D g(24, 16, 1.3, 0.7);
    const ScalarField f = testutil::random_scalar(g, 2000);
    CHECK(grad_energy_neumann(f) ==
          doctest::Approx(dot(f, laplace(f, Bc::neumann))* -1.0).epsilon(1e-11));
    CHECK(grad_energy_neumann(f) >= 0.0);
}

TEST_CASE("energy residual combines rate and dissipation") {
    EnergyReport a, b;
    a.t = 1.0;
    a.e_total = 5.0;
    b.t = 1.5;
    b.e_total = 4.0;
    b.dissipation = 1.75;
    CHECK(energy_residual_between(a, b) == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("validation flags each violation family") {
    const Grid2D g(16, 16, 1.0, 1.0);
    ModelParams params;
    ValidationTolerances tol;

    State clean(g);
    CHECK(validate(clean, params, tol).empty());

    State bad = clean;
    bad.phi(3, 5) = std::numeric_limits<double>::quiet_NaN();
    auto v = validate(bad, params, tol);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "finite-values");
    CHECK(v[0].detail.find("phi") != std::string::npos);
    CHECK(v[0].detail.find("(3, 5)") != std::string::npos);

    bad = clean;
    bad.phi(2, 2) = 1.5;
    v = validate(bad, params, tol);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "phase-bound");
    CHECK(v[0].detail.find("(2, 2)") != std::string::npos);

    bad = clean;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) bad.u.x(i, j) = g.x(i);
    v = validate(bad, params, tol);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "divergence");

    bad = clean;
    for (double& e : bad.pi.a) e = 0.5;
    v = validate(bad, params, tol);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "pi-mean");

    // an energy rise beyond the slack is flagged only with a previous report
    EnergyReport prev = energy(clean, params);
    prev.e_total = -1.0;
    tol.energy_slack = 1e-8;
    v = validate(clean, params, tol, &prev);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "energy");
}

TEST_CASE("a short production run stays monotone and divergence-free") {
    const Grid2D g(32, 32, 1.0, 1.0);
    ModelParams params;
    SolverConfig cfg;
    cfg.dt = 1e-4;

    State s(g);
    s.phi = testutil::random_scalar(g, 2100, 0.05);
    s.u = testutil::smooth_velocity(g, 2101, 0.5);
    s.mu = chemical_potential(s.phi, s.psi, params);

    EnergyReport prev = energy(s, params);
    const double e0 = prev.e_total;
    CHECK(e0 > 0.0);
    ValidationTolerances tol;
    tol.energy_slack = 1e-8 * e0;

    for (int n = 0; n < 20; ++n) {
        s = step(s, cfg, params);
        const EnergyReport cur = energy(s, params);
        CHECK(cur.e_total <= prev.e_total + 1e-8 * e0);
        CHECK(cur.div_residual <= 1e-8);
        CHECK(cur.dissipation >= 0.0);
        CHECK(validate(s, params, tol, &prev).empty());
        prev = cur;
    }
}
