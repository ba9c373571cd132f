#include "tflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tflow {

void PotentialParams::validate() const {
    if (!(theta > 0.0) || !(theta0 > 0.0))
        throw std::invalid_argument("potential: theta and theta0 must be > 0");
    if (!(theta < theta0))
        throw std::invalid_argument("potential: requires theta < theta0");
    if (!(xi > 0.0) || !(xi < 0.5))
        throw std::invalid_argument("potential: xi must lie in (0, 1/2)");
}

void CoefficientParams::validate() const {
    if (!(nu1 > 0.0) || !(nu2 > 0.0))
        throw std::invalid_argument("coefficients: nu1, nu2 must be > 0");
    if (!(lambda_star > 0.0) || !(lambda_slope > 0.0))
        throw std::invalid_argument("coefficients: lambda_star, lambda_slope must be > 0");
    if (!(k_star > 0.0) || k_slope < 0.0)
        throw std::invalid_argument("coefficients: k_star must be > 0 and k_slope >= 0");
    if (!(sigma > 0.0))
        throw std::invalid_argument("coefficients: sigma must be > 0");
    if (alpha_filter < 0.0)
        throw std::invalid_argument("coefficients: alpha_filter must be >= 0");
}

double CoefficientParams::contrast_ratio() const {
    return std::abs(nu1 - nu2) / (nu1 + nu2);
}

// ---- singular potential -------------------------------------------------

static void require_open_interval(double s) {
    if (!(std::abs(s) < 1.0))
        throw std::domain_error("potential: argument must satisfy |s| < 1");
}

double f_value(double s, const PotentialParams& p) {
    require_open_interval(s);
    return 0.5 * p.theta * ((1.0 + s) * std::log(1.0 + s) + (1.0 - s) * std::log(1.0 - s));
}

double f_prime(double s, const PotentialParams& p) {
    require_open_interval(s);
    return 0.5 * p.theta * std::log((1.0 + s) / (1.0 - s));
}

double f_second(double s, const PotentialParams& p) {
    require_open_interval(s);
    return p.theta / ((1.0 - s) * (1.0 + s));
}

double psi_value(double s, const PotentialParams& p) {
    return f_value(s, p) - 0.5 * p.theta0 * s * s;
}

double psi_prime(double s, const PotentialParams& p) {
    return f_prime(s, p) - p.theta0 * s;
}

double psi_second(double s, const PotentialParams& p) {
    return f_second(s, p) - p.theta0;
}

double f_xi(double s, const PotentialParams& p, int order) {
    if (order < 0 || order > 2)
        throw std::invalid_argument("f_xi: order must be 0, 1 or 2");
    const double a = 1.0 - p.xi;
    if (std::abs(s) <= a) {
        if (order == 0) return f_value(s, p);
        if (order == 1) return f_prime(s, p);
        return f_second(s, p);
    }
    const double b = (s > 0.0) ? a : -a;  // expansion point
    const double d = s - b;
    const double f0 = f_value(b, p), f1 = f_prime(b, p), f2 = f_second(b, p);
    if (order == 0) return f0 + f1 * d + 0.5 * f2 * d * d;
    if (order == 1) return f1 + f2 * d;
    return f2;
}

double psi_xi_value(double s, const PotentialParams& p) {
    return f_xi(s, p, 0) - 0.5 * p.theta0 * s * s;
}

double psi_xi_prime(double s, const PotentialParams& p) {
    return f_xi(s, p, 1) - p.theta0 * s;
}

double psi_xi_second(double s, const PotentialParams& p) {
    return f_xi(s, p, 2) - p.theta0;
}

double equilibrium_phase(const PotentialParams& p) {
    p.validate();
    // Psi' < 0 just right of 0 (theta < theta0), -> +inf toward s = 1.
    double lo = 1e-12, hi = 1.0 - 1e-15;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = psi_prime(mid, p);
        if (std::abs(r) <= 1e-12) return mid;
        (r < 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-17) break;
    }
    return 0.5 * (lo + hi);
}

// ---- coefficients -------------------------------------------------------

static double clamp_unit(double s) { return std::clamp(s, -1.0, 1.0); }

double nu_of(double s, const CoefficientParams& c) {
    const double t = clamp_unit(s);
    return 0.5 * c.nu1 * (1.0 + t) + 0.5 * c.nu2 * (1.0 - t);
}

double k_of(double s, const CoefficientParams& c) {
    const double t = clamp_unit(s);
    return c.k_star + 0.5 * c.k_slope * (1.0 + t);
}

double lambda_of(double s, const CoefficientParams& c) {
    const double t = clamp_unit(s);
    return c.lambda_star + c.lambda_slope * (t + 1.0);
}

double lambda_prime_of(double s, const CoefficientParams& c) {
    (void)clamp_unit(s);
    return c.lambda_slope;
}

double darcy_coefficient(double phi, const CoefficientParams& c) {
    if (std::abs(phi) > 1.0 + 1e-9)
        throw std::domain_error("darcy_coefficient: phi outside [-1,1]");
    const double s = clamp_unit(phi);
    return nu_of(s, c) * (1.0 - s) / (2.0 * k_of(s, c));
}

Coefficient affine_lambda(const CoefficientParams& c) {
    const double l0 = c.lambda_star, m = c.lambda_slope;
    return Coefficient{
        [l0, m](double s) { return l0 + m * (s + 1.0); },
        [m](double) { return m; },
    };
}

static BumpQuadrature build_bump_quadrature() {
    constexpr int n = 64;
    BumpQuadrature q;
    q.node.resize(n);
    q.weight.resize(n);
    // Gauss-Legendre nodes by Newton iteration on P_n, mirrored pairs.
    const double pi = std::acos(-1.0);
    for (int i = 0; i < n / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        const double wgl = 2.0 / ((1.0 - z * z) * pp * pp);
        const double rho = std::exp(-1.0 / (1.0 - z * z));
        q.node[i] = -z;
        q.node[n - 1 - i] = z;
        q.weight[i] = q.weight[n - 1 - i] = wgl * rho;
    }
    double mass = 0.0;
    for (double w : q.weight) mass += w;
    for (double& w : q.weight) w /= mass;
    return q;
}

const BumpQuadrature& bump_quadrature() {
    static const BumpQuadrature q = build_bump_quadrature();
    return q;
}

Coefficient mollify_lambda(const Coefficient& lam, double alpha) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("mollify_lambda: width alpha must be > 0");
    const BumpQuadrature& q = bump_quadrature();
    auto smooth = [alpha, &q](const std::function<double(double)>& f) {
        return [alpha, &q, f](double s) {
            double acc = 0.0;
            for (std::size_t i = 0; i < q.node.size(); ++i)
                acc += q.weight[i] * f(s - alpha * q.node[i]);
            return acc;
        };
    };
    return Coefficient{smooth(lam.value), smooth(lam.prime)};
}

}  // namespace tflow
