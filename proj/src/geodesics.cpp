#include "overwarp/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <omp.h>

namespace overwarp {

namespace {

constexpr double kGolden = 0.6180339887498949;

struct GeoState {
    double r, th, p, q; // position and chart velocities
};

} // namespace

GeodesicPath geodesic_shoot(const WarpedManifold& m, double r0, double theta0, double alpha,
                            double length, double step) {
    if (!(step > 0.0) || !(length >= 0.0))
        throw precondition_error("geodesic_shoot: need step > 0 and length >= 0");
    const Interval dom = m.sigma.domain();
    if (!dom.contains(r0))
        throw precondition_error("geodesic_shoot: start outside chart");

    const double lo_eff = dom.closed_at_lo ? 1e-9 : dom.lo;
    auto in_chart = [&](double r) { return r > lo_eff && r < dom.hi; };

    const double sig0 = m.sigma.eval(r0, 0);
    GeoState s{r0, theta0, std::cos(alpha), std::sin(alpha) / sig0};

    GeodesicPath path;
    path.clairaut_constant = sig0 * sig0 * s.q;
    const int cells = std::max(1, static_cast<int>(std::lround(length / step)));
    const double h = length > 0.0 ? length / cells : 0.0;
    path.t.reserve(cells + 1);
    path.r.reserve(cells + 1);
    path.theta.reserve(cells + 1);
    path.t.push_back(0.0);
    path.r.push_back(s.r);
    path.theta.push_back(s.th);

    auto rhs = [&](const GeoState& y) {
        const double sig = m.sigma.eval(y.r, 0);
        const double sig1 = m.sigma.eval(y.r, 1);
        return GeoState{y.p, y.q, sig * sig1 * y.q * y.q, -2.0 * (sig1 / sig) * y.p * y.q};
    };
    auto axpy = [](const GeoState& y, double a, const GeoState& d) {
        return GeoState{y.r + a * d.r, y.th + a * d.th, y.p + a * d.p, y.q + a * d.q};
    };

    // one RK4 micro-step; returns false when a stage leaves the chart
    auto rk4_step = [&](GeoState& y, double dt) -> bool {
        if (!in_chart(y.r) || !in_chart(y.r + dt * y.p))
            return false;
        const GeoState k1 = rhs(y);
        const GeoState y2 = axpy(y, 0.5 * dt, k1);
        if (!in_chart(y2.r))
            return false;
        const GeoState k2 = rhs(y2);
        const GeoState y3 = axpy(y, 0.5 * dt, k2);
        if (!in_chart(y3.r))
            return false;
        const GeoState k3 = rhs(y3);
        const GeoState y4 = axpy(y, dt, k3);
        if (!in_chart(y4.r))
            return false;
        const GeoState k4 = rhs(y4);
        y.r += dt / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
        y.th += dt / 6.0 * (k1.th + 2.0 * k2.th + 2.0 * k3.th + k4.th);
        y.p += dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
        y.q += dt / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
        return in_chart(y.r);
    };

    // near a pole the curvature of the flow scales like 1/r; shrink the
    // step so near-radial shots swing around cleanly
    const double r_guard = dom.closed_at_lo ? 0.05 : 0.0;

    for (int i = 0; i < cells; ++i) {
        bool ok;
        if (s.r < r_guard) {
            const int nsub = std::clamp(static_cast<int>(std::ceil(20.0 * h / std::max(s.r, 1e-6))), 1, 512);
            ok = true;
            for (int k = 0; k < nsub && ok; ++k)
                ok = rk4_step(s, h / nsub);
        } else {
            ok = rk4_step(s, h);
        }
        if (!ok) {
            path.exited_chart = true;
            break;
        }
        path.t.push_back((i + 1) * h);
        path.r.push_back(s.r);
        path.theta.push_back(s.th);

        const double sig = m.sigma.eval(s.r, 0);
        path.max_speed_drift = std::max(path.max_speed_drift,
                                        std::abs(std::sqrt(s.p * s.p + sig * sig * s.q * s.q) - 1.0));
        path.max_clairaut_drift =
            std::max(path.max_clairaut_drift, std::abs(sig * sig * s.q - path.clairaut_constant));
    }
    return path;
}

namespace {

double wrap_pi(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

struct Approach {
    double miss = std::numeric_limits<double>::infinity();
    double arclength = 0.0;
};

// Closest approach of the shot to (qr, qt), measuring the miss in the
// chart-local metric around the target.
Approach closest_approach(const WarpedManifold& m, double alpha, double pr, double pt, double qr,
                          double qt, double max_len, double step) {
    const double sig_q = m.sigma.eval(qr, 0);
    GeodesicPath path = geodesic_shoot(m, pr, pt, alpha, max_len, step);
    Approach best;
    std::vector<double> miss(path.t.size());
    for (std::size_t i = 0; i < path.t.size(); ++i) {
        miss[i] = std::hypot(path.r[i] - qr, sig_q * wrap_pi(path.theta[i] - qt));
        if (miss[i] < best.miss) {
            best.miss = miss[i];
            best.arclength = path.t[i];
        }
    }
    // parabolic refinement of the sample minimum
    for (std::size_t i = 1; i + 1 < miss.size(); ++i) {
        if (miss[i] <= miss[i - 1] && miss[i] <= miss[i + 1]) {
            const double denom = miss[i - 1] - 2.0 * miss[i] + miss[i + 1];
            if (denom > 0.0) {
                const double dt = 0.5 * (miss[i - 1] - miss[i + 1]) / denom;
                const double t_ref = path.t[i] + dt * (path.t[1] - path.t[0]);
                const double m_ref = miss[i] - 0.25 * (miss[i - 1] - miss[i + 1]) * dt;
                if (m_ref < best.miss) {
                    best.miss = std::max(0.0, m_ref);
                    best.arclength = t_ref;
                }
            }
        }
    }
    return best;
}

} // namespace

double distance_by_shooting(const WarpedManifold& m, double pr, double pt, double qr, double qt,
                            double tol, const ShootingOptions& opts) {
    const Interval dom = m.sigma.domain();
    if (!dom.contains(pr) || !dom.contains(qr))
        throw precondition_error("distance_by_shooting: endpoint outside chart");
    if (!(tol > 0.0))
        throw precondition_error("distance_by_shooting: tol must be positive");

    const double sig_q = m.sigma.eval(qr, 0);
    const double direct_gap = std::hypot(pr - qr, sig_q * wrap_pi(pt - qt));
    if (direct_gap == 0.0)
        return 0.0;

    // crude upper bound: radial legs to a common circle plus the arc there
    const double lo_eff = dom.closed_at_lo ? 1e-6 : dom.lo + 1e-9;
    const double rmin_hi = std::min(pr, qr);
    double bound = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 32; ++i) {
        const double rm = lo_eff + (rmin_hi - lo_eff) * i / 32.0;
        if (!(rm > 0.0) && !dom.closed_at_lo)
            continue;
        const double arc = m.sigma.eval(std::max(rm, lo_eff), 0) * std::abs(wrap_pi(qt - pt));
        bound = std::min(bound, (pr - rm) + (qr - rm) + arc);
    }
    const double max_len = 1.25 * bound + 10.0 * tol;

    const int nsweep = std::max(8, opts.sweep_angles);
    std::vector<Approach> sweep(nsweep);
    const int parts = std::max(1, opts.partitions);
#pragma omp parallel for schedule(static) num_threads(parts) if (parts > 1)
    for (int a = 0; a < nsweep; ++a) {
        const double alpha = 2.0 * std::numbers::pi * a / nsweep;
        sweep[a] = closest_approach(m, alpha, pr, pt, qr, qt, max_len, opts.sweep_step);
    }
    int best_idx = 0;
    for (int a = 1; a < nsweep; ++a)
        if (sweep[a].miss < sweep[best_idx].miss)
            best_idx = a;

    // golden-section refinement of the miss around the best sweep angle
    const double da = 2.0 * std::numbers::pi / nsweep;
    double lo = 2.0 * std::numbers::pi * best_idx / nsweep - da;
    double hi = lo + 2.0 * da;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    Approach f1 = closest_approach(m, x1, pr, pt, qr, qt, max_len, opts.step);
    Approach f2 = closest_approach(m, x2, pr, pt, qr, qt, max_len, opts.step);
    Approach best = f1.miss < f2.miss ? f1 : f2;
    for (int it = 0; it < opts.refine_iters; ++it) {
        if (f1.miss < f2.miss) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = closest_approach(m, x1, pr, pt, qr, qt, max_len, opts.step);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = closest_approach(m, x2, pr, pt, qr, qt, max_len, opts.step);
        }
        const Approach& cand = f1.miss < f2.miss ? f1 : f2;
        if (cand.miss < best.miss)
            best = cand;
        if (best.miss < 0.05 * tol)
            break;
    }

    double best_len = std::numeric_limits<double>::infinity();
    if (best.miss <= tol)
        best_len = best.arclength;
    if (m.is_model()) {
        // two radial legs through the pole are a genuine geodesic when the
        // target sits (nearly) opposite in angle
        const double pole_miss = sig_q * std::abs(wrap_pi(qt - (pt + std::numbers::pi)));
        if (pole_miss <= tol)
            best_len = std::min(best_len, pr + qr);
    }
    if (!std::isfinite(best_len)) {
        std::ostringstream os;
        os << "distance_by_shooting: no geodesic hit within tol (best miss " << best.miss << ")";
        throw not_found_error(os.str());
    }
    return best_len;
}

double star_shapedness_check(const WarpedManifold& m, double r0, double theta0, double radius,
                             int n_rays, const StarOptions& opts) {
    if (n_rays < 1)
        throw precondition_error("star_shapedness_check: n_rays must be >= 1");
    if (!(radius > 0.0))
        throw precondition_error("star_shapedness_check: radius must be positive");
    const Interval dom = m.sigma.domain();
    const double h = opts.grid_h > 0.0 ? opts.grid_h : radius / 64.0;
    const double pad = 0.25 * radius + 4.0 * h;
    const double lo_eff = dom.closed_at_lo ? 1e-9 : dom.lo;
    const double g_lo = r0 - radius - pad;
    const double g_hi = r0 + radius + pad;
    if (g_lo <= lo_eff || g_hi >= dom.hi)
        throw chart_overflow_error("star_shapedness_check: geodesic ball reaches the chart edge");

    std::function<double(double, double)> dist;
    Grid2D grid;
    ScalarField2D dfield;
    if (opts.source == DistanceSource::exact) {
        dist = closed_form_distance(m, r0, theta0);
    } else {
        const int nr = std::max(8, static_cast<int>(std::ceil((g_hi - g_lo) / h)));
        double sig_max = 0.0;
        for (int i = 0; i <= 16; ++i)
            sig_max = std::max(sig_max, m.sigma.eval(g_lo + (g_hi - g_lo) * i / 16.0, 0));
        int ntheta = static_cast<int>(std::ceil(2.0 * std::numbers::pi * sig_max / h));
        ntheta += ntheta % 2;
        ntheta = std::max(ntheta, 8);
        grid = Grid2D(g_lo, g_hi, nr, ntheta);
        dfield = eikonal_distance(m, r0, theta0, grid);
        dist = [&grid, &dfield](double r, double t) {
            const double fi = (r - grid.r_lo) / grid.hr();
            int i = std::clamp(static_cast<int>(std::floor(fi)), 0, grid.nr - 1);
            const double wr = std::clamp(fi - i, 0.0, 1.0);
            double ft = t / grid.htheta();
            ft -= std::floor(ft / grid.ntheta) * grid.ntheta;
            int j = static_cast<int>(std::floor(ft)) % grid.ntheta;
            if (j < 0)
                j += grid.ntheta;
            const double wt = ft - std::floor(ft);
            const int jp = (j + 1) % grid.ntheta;
            const auto& v = dfield.values;
            return (1.0 - wr) * ((1.0 - wt) * v[grid.node(i, j)] + wt * v[grid.node(i, jp)]) +
                   wr * ((1.0 - wt) * v[grid.node(i + 1, j)] + wt * v[grid.node(i + 1, jp)]);
        };
    }

    std::vector<double> ray_margin(n_rays, std::numeric_limits<double>::infinity());
    const int parts = std::max(1, opts.partitions);
#pragma omp parallel for schedule(static) num_threads(parts) if (parts > 1)
    for (int ray = 0; ray < n_rays; ++ray) {
        const double alpha = 2.0 * std::numbers::pi * ray / n_rays;
        GeodesicPath path = geodesic_shoot(m, r0, theta0, alpha, radius, opts.step);
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < path.t.size(); ++i)
            margin = std::min(margin, radius - dist(path.r[i], path.theta[i]));
        ray_margin[ray] = margin;
    }
    double margin = std::numeric_limits<double>::infinity();
    for (int ray = 0; ray < n_rays; ++ray)
        margin = std::min(margin, ray_margin[ray]);
    return margin;
}

} // namespace overwarp
