#ifndef OVERWARP_RADIAL_HPP
#define OVERWARP_RADIAL_HPP

#include <vector>

#include "overwarp/geometry.hpp"
#include "overwarp/radial_profile.hpp"

namespace overwarp {

/// Solution of u'' + (n-1)(sigma'/sigma) u' + nku = -1, u'(0) = 0,
/// u(ball_radius) = 0 on the three constant-curvature model balls:
///   k < 0 : cosh(sr)/(kn cosh(s rho)) - 1/(nk),  s = sqrt(-k)
///   k = 0 : (rho^2 - r^2)/(2n)
///   k > 0 : cos(sr)/(kn cos(s rho)) - 1/(nk),    s = sqrt(k)
double closed_form_solution(double k, int n, double ball_radius, double r);

/// |u'(ball_radius)| of the closed form: rho/n, tan(s rho)/(s n), tanh(s rho)/(s n).
double closed_form_boundary_gradient(double k, int n, double ball_radius);

/// Samples the closed form into a profile carrying analytic evaluators.
RadialProfile closed_form_profile(double k, int n, double ball_radius, double step);

struct RadialSolveOptions {
    double shoot_tol = 1e-12;    // |u(rho)| < shoot_tol * max(1, |u(0)|)
    int max_bracket_doublings = 60;
};

/// Shooting solve of the radial reduction on a model ball.  Fourth-order
/// one-step integration; the first step uses the Taylor series forced by
/// the smoothness conditions at the pole.
RadialProfile solve_radial_bvp(const WarpedManifold& m, double k, double ball_radius, double step,
                               const RadialSolveOptions& opts = {});

/// Integrates f''(s) = -1/n - k f(s), f(0) = y0, f'(0) = 0 and returns
/// samples of f at t = 0, step, 2 step, ..., t_max.
std::vector<double> obata_ode_solve(double k, int n, double y0, double t_max, double step);

/// Closed form of the same initial value problem.
double obata_closed_form(double k, int n, double y0, double t);

struct MetricRecovery {
    std::vector<double> r;
    std::vector<double> sigma_hat;
    double max_residual_vs_branch = 0.0; // max |sigma_hat - branch formula|
    double hessian_residual = 0.0;       // max |u'' + (1/n + k u)| over the grid
};

/// Recovers the warping function from a radial solution of the Hessian
/// equation by integrating sigma'/sigma = -(1/n + ku)/u' with sigma ~ r
/// near the pole, and compares against the constant-curvature branch
/// selected by u.k.
MetricRecovery recover_metric_from_hessian(const RadialProfile& u, const WarpedManifold& m);

/// The branch formula the recovery is compared against: sinh(sr)/s, r, sin(sr)/s.
double metric_branch_formula(double k, double r);

} // namespace overwarp

#endif
