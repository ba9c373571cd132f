#pragma once

#include <functional>
#include <vector>

namespace tflow {

/// Flory-Huggins double-well parameters.  Psi(s) = F(s) - (theta0/2) s^2
/// with the convex logarithmic part F; the well exists only for
/// theta < theta0.  xi is the width of the quadratic tail extension that
/// turns F into the globally defined C^2 function F_xi.
struct PotentialParams {
    double theta = 1.0;
    double theta0 = 2.0;
    double xi = 1e-4;

    void validate() const;
};

/// Constitutive coefficients: affine viscosity between the pure phases,
/// affine elastic relaxation lambda, affine permeability k, capillary
/// coefficient sigma, and the Helmholtz filter width recorded with them.
struct CoefficientParams {
    double nu1 = 1.0;           // viscosity of pure blood (s = +1)
    double nu2 = 1.5;           // viscosity of pure thrombus (s = -1)
    double lambda_star = 1.0;   // lambda(-1)
    double lambda_slope = 0.5;  // d lambda / ds, > 0
    double k_star = 0.5;        // k(-1)
    double k_slope = 0.5;       // k(1) - k(-1), >= 0
    double sigma = 1.0;
    double alpha_filter = 0.0;

    void validate() const;
    double contrast_ratio() const;  // |nu1-nu2| / (nu1+nu2)
};

struct ModelParams {
    PotentialParams pot;
    CoefficientParams coef;

    void validate() const { pot.validate(); coef.validate(); }
};

// ---- singular potential -------------------------------------------------

/// Psi(s); throws std::domain_error for |s| >= 1.
double psi_value(double s, const PotentialParams& p);
double psi_prime(double s, const PotentialParams& p);
double psi_second(double s, const PotentialParams& p);

/// Convex logarithmic part F and derivatives on (-1,1).
double f_value(double s, const PotentialParams& p);
double f_prime(double s, const PotentialParams& p);
double f_second(double s, const PotentialParams& p);

/// Globally defined regularization of F: identical to F on
/// [-1+xi, 1-xi], quadratic Taylor extension about +-(1-xi) outside.
/// order selects the value (0), first (1) or second (2) derivative.
double f_xi(double s, const PotentialParams& p, int order = 0);

/// Regularized total potential Psi_xi = F_xi - (theta0/2) s^2 and its
/// derivatives, defined on the whole line.
double psi_xi_value(double s, const PotentialParams& p);
double psi_xi_prime(double s, const PotentialParams& p);
double psi_xi_second(double s, const PotentialParams& p);

/// Positive root of Psi' in (0,1), by bisection to 1e-12 residual.
double equilibrium_phase(const PotentialParams& p);

// ---- coefficients -------------------------------------------------------

/// All coefficient evaluators clamp the argument to [-1,1] first, so the
/// declared bounds hold for every real input.
double nu_of(double s, const CoefficientParams& c);
double k_of(double s, const CoefficientParams& c);
double lambda_of(double s, const CoefficientParams& c);
double lambda_prime_of(double s, const CoefficientParams& c);

/// Darcy friction g(phi) = nu(phi)(1-phi)/(2 k(phi)); domain [-1,1] with a
/// 1e-9 clamp tolerance, std::domain_error beyond it.
double darcy_coefficient(double phi, const CoefficientParams& c);

/// A scalar coefficient together with its derivative, so mollification can
/// transform both consistently.
struct Coefficient {
    std::function<double(double)> value;
    std::function<double(double)> prime;
};

/// The affine elastic coefficient of `c` as an unclamped function on the
/// whole line (the form the mollifier needs to preserve convexity).
Coefficient affine_lambda(const CoefficientParams& c);

/// Convolution with a normalized C-infinity bump of width alpha, evaluated
/// by a fixed 64-node Gauss-Legendre rule with exactly unit total weight.
/// Affine inputs are reproduced exactly; convexity and sup bounds of the
/// input survive because the weights are positive.
Coefficient mollify_lambda(const Coefficient& lam, double alpha);

/// Nodes/weights of the bump quadrature (exposed for tests).
struct BumpQuadrature {
    std::vector<double> node;
    std::vector<double> weight;  // positive, sums to 1 exactly as built
};
const BumpQuadrature& bump_quadrature();

}  // namespace tflow
