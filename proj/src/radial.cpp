#include "overwarp/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace overwarp {

namespace {

void require_admissible(double k, double ball_radius) {
    if (!(ball_radius > 0.0))
        throw precondition_error("ball_radius must be positive");
    // the closed form divides by cos(sqrt(k) rho); beyond pi/(2 sqrt(k))
    // it changes sign and positivity fails
    if (k > 0.0 && !(std::cos(std::sqrt(k) * ball_radius) > 1e-12)) {
        std::ostringstream os;
        os << "inadmissible radius: k = " << k << " requires ball_radius < pi/(2 sqrt(k))";
        throw precondition_error(os.str());
    }
}

} // namespace

double closed_form_solution(double k, int n, double ball_radius, double r) {
    require_admissible(k, ball_radius);
    if (r < 0.0 || r > ball_radius)
        throw domain_error("closed_form_solution: r outside [0, ball_radius]");
    if (k == 0.0)
        return (ball_radius * ball_radius - r * r) / (2.0 * n);
    if (k < 0.0) {
        const double s = std::sqrt(-k);
        return std::cosh(s * r) / (k * n * std::cosh(s * ball_radius)) - 1.0 / (n * k);
    }
    const double s = std::sqrt(k);
    return std::cos(s * r) / (k * n * std::cos(s * ball_radius)) - 1.0 / (n * k);
}

double closed_form_boundary_gradient(double k, int n, double ball_radius) {
    require_admissible(k, ball_radius);
    if (k == 0.0)
        return ball_radius / n;
    if (k < 0.0) {
        const double s = std::sqrt(-k);
        return std::tanh(s * ball_radius) / (s * n);
    }
    const double s = std::sqrt(k);
    return std::tan(s * ball_radius) / (s * n);
}

RadialProfile closed_form_profile(double k, int n, double ball_radius, double step) {
    require_admissible(k, ball_radius);
    const int cells = std::max(4, static_cast<int>(std::lround(ball_radius / step)));
    auto u = [k, n, ball_radius](double r) { return closed_form_solution(k, n, ball_radius, r); };
    std::function<double(double)> du, d2u;
    if (k == 0.0) {
        du = [n](double r) { return -r / n; };
        d2u = [n](double) { return -1.0 / n; };
    } else if (k < 0.0) {
        const double s = std::sqrt(-k);
        const double denom = k * n * std::cosh(s * ball_radius);
        du = [s, denom](double r) { return s * std::sinh(s * r) / denom; };
        d2u = [s, denom](double r) { return s * s * std::cosh(s * r) / denom; };
    } else {
        const double s = std::sqrt(k);
        const double denom = k * n * std::cos(s * ball_radius);
        du = [s, denom](double r) { return -s * std::sin(s * r) / denom; };
        d2u = [s, denom](double r) { return -s * s * std::cos(s * r) / denom; };
    }
    RadialProfile p = RadialProfile::from_functions(n, k, 0.0, ball_radius, cells + 1, u, du, d2u);
    return p;
}

namespace {

struct ShotResult {
    std::vector<double> u, du, d2u;
    double u_end, du_end;
};

// One shooting integration with initial height u0.  The drift
// (n-1) sigma'/sigma is singular at the pole, so the first step comes
// from the series u0 + a2 r^2 + a4 r^4 with coefficients forced by the
// equation and the model smoothness of sigma.
ShotResult integrate_shot(const WarpedManifold& m, double k, double u0, int cells, double h) {
    const int n = m.n;
    const double s3 = m.sigma.eval(0.0, 3) / 6.0; // sigma = r + s3 r^3 + ...
    const double a2 = -(1.0 + n * k * u0) / (2.0 * n);
    const double a4 = -a2 * (n * k + 4.0 * (n - 1) * s3) / (4.0 * n + 8.0);

    ShotResult out;
    out.u.resize(cells + 1);
    out.du.resize(cells + 1);
    out.d2u.resize(cells + 1);
    out.u[0] = u0;
    out.du[0] = 0.0;
    out.d2u[0] = 2.0 * a2;

    double u = u0 + a2 * h * h + a4 * h * h * h * h;
    double v = 2.0 * a2 * h + 4.0 * a4 * h * h * h;
    out.u[1] = u;
    out.du[1] = v;

    auto accel = [&](double r, double uu, double vv) {
        const double sig = m.sigma.eval(r, 0);
        const double sig1 = m.sigma.eval(r, 1);
        return -1.0 - n * k * uu - (n - 1) * (sig1 / sig) * vv;
    };
    out.d2u[1] = accel(h, u, v);

    for (int i = 1; i < cells; ++i) {
        const double r = i * h;
        const double k1u = v, k1v = accel(r, u, v);
        const double k2u = v + 0.5 * h * k1v, k2v = accel(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        const double k3u = v + 0.5 * h * k2v, k3v = accel(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        const double k4u = v + h * k3v, k4v = accel(r + h, u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        out.u[i + 1] = u;
        out.du[i + 1] = v;
        out.d2u[i + 1] = accel((i + 1) * h, u, v);
    }
    out.u_end = u;
    out.du_end = v;
    return out;
}

} // namespace

RadialProfile solve_radial_bvp(const WarpedManifold& m, double k, double ball_radius, double step,
                               const RadialSolveOptions& opts) {
    if (!m.is_model())
        throw precondition_error("solve_radial_bvp: manifold must be a model manifold (pole at r = 0)");
    if (std::abs(m.sigma.eval(0.0, 0)) > 1e-10 || std::abs(m.sigma.eval(0.0, 1) - 1.0) > 1e-8 ||
        std::abs(m.sigma.eval(0.0, 2)) > 1e-8)
        throw precondition_error("solve_radial_bvp: sigma is not a valid model warping "
                                 "(needs sigma(0)=0, sigma'(0)=1, sigma''(0)=0)");
    if (!(step > 0.0))
        throw precondition_error("solve_radial_bvp: step must be positive");
    if (!(ball_radius > 0.0) || ball_radius >= m.sigma.domain().hi)
        throw precondition_error("solve_radial_bvp: ball_radius must lie inside the chart interval");

    const int cells = std::max(4, static_cast<int>(std::lround(ball_radius / step)));
    const double h = ball_radius / cells;

    auto end_value = [&](double u0) { return integrate_shot(m, k, u0, cells, h).u_end; };

    // The problem is linear in u, so u(rho; u0) is affine in u0: bracket,
    // bisect a little, finish with secant.
    double lo = 0.0, hi = 1.0;
    double flo = end_value(lo);
    double fhi = end_value(hi);
    int doublings = 0;
    while (flo * fhi > 0.0) {
        if (++doublings > opts.max_bracket_doublings) {
            std::ostringstream os;
            os << "solve_radial_bvp: shooting failed to bracket u(0) for k = " << k
               << ", ball_radius = " << ball_radius;
            throw no_solution_error(os.str());
        }
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = end_value(hi);
    }
    for (int i = 0; i < 8; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = end_value(mid);
        if (flo * fmid <= 0.0) {
            hi = mid;
            fhi = fmid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    double u0 = lo, f0 = flo, u1 = hi, f1 = fhi;
    for (int i = 0; i < 30; ++i) {
        if (f1 == f0)
            break;
        const double u2 = u1 - f1 * (u1 - u0) / (f1 - f0);
        u0 = u1;
        f0 = f1;
        u1 = u2;
        f1 = end_value(u1);
        if (std::abs(f1) < opts.shoot_tol * std::max(1.0, std::abs(u1)))
            break;
    }
    if (!(std::abs(f1) < opts.shoot_tol * std::max(1.0, std::abs(u1))))
        throw no_solution_error("solve_radial_bvp: shooting did not converge");

    ShotResult shot = integrate_shot(m, k, u1, cells, h);
    RadialProfile p;
    p.n = m.n;
    p.k = k;
    p.r.resize(cells + 1);
    for (int i = 0; i <= cells; ++i)
        p.r[i] = (i == cells) ? ball_radius : i * h;
    p.u = std::move(shot.u);
    p.du = std::move(shot.du);
    p.d2u = std::move(shot.d2u);
    p.boundary_gradient_c = std::abs(shot.du_end);
    return p;
}

std::vector<double> obata_ode_solve(double k, int n, double y0, double t_max, double step) {
    if (!(step > 0.0))
        throw precondition_error("obata_ode_solve: step must be positive");
    const int cells = std::max(1, static_cast<int>(std::lround(t_max / step)));
    const double h = t_max / cells;
    std::vector<double> out(cells + 1);
    double y = y0, v = 0.0;
    out[0] = y;
    auto accel = [k, n](double yy) { return -1.0 / n - k * yy; };
    for (int i = 0; i < cells; ++i) {
        const double k1y = v, k1v = accel(y);
        const double k2y = v + 0.5 * h * k1v, k2v = accel(y + 0.5 * h * k1y);
        const double k3y = v + 0.5 * h * k2v, k3v = accel(y + 0.5 * h * k2y);
        const double k4y = v + h * k3v, k4v = accel(y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        out[i + 1] = y;
    }
    return out;
}

double obata_closed_form(double k, int n, double y0, double t) {
    if (k == 0.0)
        return y0 - t * t / (2.0 * n);
    if (k > 0.0)
        return (y0 + 1.0 / (k * n)) * std::cos(std::sqrt(k) * t) - 1.0 / (k * n);
    return (y0 + 1.0 / (k * n)) * std::cosh(std::sqrt(-k) * t) - 1.0 / (k * n);
}

double metric_branch_formula(double k, double r) {
    if (k == 0.0)
        return r;
    if (k < 0.0) {
        const double s = std::sqrt(-k);
        return std::sinh(s * r) / s;
    }
    const double s = std::sqrt(k);
    return std::sin(s * r) / s;
}

MetricRecovery recover_metric_from_hessian(const RadialProfile& u, const WarpedManifold& m) {
    const std::size_t npts = u.size();
    if (npts < 5)
        throw precondition_error("recover_metric_from_hessian: profile too short");
    if (u.r.front() != 0.0)
        throw precondition_error("recover_metric_from_hessian: profile must start at the pole r = 0");

    const int n = u.n;
    const double k = u.k;

    MetricRecovery out;
    out.r = u.r;
    out.sigma_hat.assign(npts, 0.0);

    // radial and tangential residuals of the Hessian equation; the
    // tangential one reads the metric from m.
    double hess = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
        hess = std::max(hess, std::abs(u.d2u[i] + (1.0 / n + k * u.u[i])));
        if (i > 0 && u.r[i] <= m.sigma.domain().hi) {
            const double sig = m.sigma.eval(u.r[i], 0);
            const double sig1 = m.sigma.eval(u.r[i], 1);
            hess = std::max(hess, std::abs(u.du[i] * sig1 / sig + (1.0 / n + k * u.u[i])));
        }
    }
    out.hessian_residual = hess;
    if (hess > 1e-4)
        throw precondition_error("recover_metric_from_hessian: profile does not satisfy the "
                                 "radial Hessian equation (residual too large)");

    // sigma'/sigma - 1/r is regular at the pole; integrate it and attach
    // the factor r so that sigma_hat(0) = 0, sigma_hat'(0) = 1.
    auto log_slope_excess = [&](double r, double uu, double uprime) {
        if (r == 0.0)
            return 0.0;
        if (uprime == 0.0)
            throw degenerate_recovery_error("recover_metric_from_hessian: u'(r) = 0 in the interior");
        return -(1.0 / n + k * uu) / uprime - 1.0 / r;
    };

    std::vector<double> psi(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        if (i > 0 && std::abs(u.du[i]) < 1e-14)
            throw degenerate_recovery_error("recover_metric_from_hessian: u'(r) = 0 in the interior");
        psi[i] = log_slope_excess(u.r[i], u.u[i], u.du[i]);
    }

    double integral = 0.0;
    out.sigma_hat[0] = 0.0;
    double max_res = 0.0;
    for (std::size_t i = 0; i + 1 < npts; ++i) {
        const double h = u.r[i + 1] - u.r[i];
        const double rm = 0.5 * (u.r[i] + u.r[i + 1]);
        const double um = u.value(rm);
        const double dum = u.deriv(rm);
        const double pm = log_slope_excess(rm, um, dum);
        integral += h / 6.0 * (psi[i] + 4.0 * pm + psi[i + 1]); // Simpson per step
        out.sigma_hat[i + 1] = u.r[i + 1] * std::exp(integral);
        max_res = std::max(max_res, std::abs(out.sigma_hat[i + 1] - metric_branch_formula(k, u.r[i + 1])));
    }
    out.max_residual_vs_branch = max_res;
    return out;
}

} // namespace overwarp
