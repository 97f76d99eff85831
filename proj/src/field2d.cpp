#include "overwarp/field2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <omp.h>

namespace overwarp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double wrap_angle(double dt) {
    dt = std::remainder(dt, 2.0 * std::numbers::pi);
    return dt;
}

// Unequal-spacing three-point derivatives on values (uW, uP, uE) located
// at -alpha h, 0, +beta h.
double d1_unequal(double uW, double uP, double uE, double alpha, double beta, double h) {
    return (-beta * beta * uW + (beta * beta - alpha * alpha) * uP + alpha * alpha * uE) /
           (alpha * beta * (alpha + beta) * h);
}

double d2_unequal(double uW, double uP, double uE, double alpha, double beta, double h) {
    return 2.0 * (beta * uW - (alpha + beta) * uP + alpha * uE) /
           (alpha * beta * (alpha + beta) * h * h);
}

struct AxisSamples {
    double vm = 0.0, vp = 0.0; // neighbor values (0 at cuts)
    double am = 1.0, ap = 1.0; // distances in units of h
    bool ok = true;
};

// Collects the two neighbors of `idx` along an axis under the Dirichlet
// cut policy.  dm/dp are the mask direction codes of the axis.
AxisSamples axis_dirichlet(const DomainMask& mask, const std::vector<double>& v, int idx, int dm, int dp) {
    AxisSamples s;
    const int nbm = mask.neighbor(idx, dm);
    const int nbp = mask.neighbor(idx, dp);
    if (mask.has_cut(idx, dm)) {
        s.am = mask.frac[idx][dm];
        s.vm = 0.0;
    } else if (nbm >= 0 && mask.is_inside(nbm)) {
        s.vm = v[nbm];
    } else {
        s.ok = false;
    }
    if (mask.has_cut(idx, dp)) {
        s.ap = mask.frac[idx][dp];
        s.vp = 0.0;
    } else if (nbp >= 0 && mask.is_inside(nbp)) {
        s.vp = v[nbp];
    } else {
        s.ok = false;
    }
    return s;
}

} // namespace

ScalarField2D effective_dimension_laplacian(const WarpedManifold& m, const ScalarField2D& field,
                                            CutPolicy policy) {
    const DomainMask& mask = *field.mask;
    const Grid2D& g = mask.grid;
    if (mask.touches_chart_edge)
        throw chart_overflow_error("effective_dimension_laplacian: mask reaches the r-chart edge");
    ScalarField2D out(field.mask, kNaN);
    for (int idx : mask.nodes) {
        const int i = g.node_i(idx);
        const double r = g.r(i);
        const double sig = m.sigma.eval(r, 0);
        const double drift = (m.n - 1) * m.sigma.eval(r, 1) / sig;

        if (policy == CutPolicy::one_sided_interior && mask.cut_dirs[idx] != 0)
            continue; // leave NaN: no boundary data to lean on

        AxisSamples rr = axis_dirichlet(mask, field.values, idx, dir_rm, dir_rp);
        AxisSamples tt = axis_dirichlet(mask, field.values, idx, dir_tm, dir_tp);
        if (!rr.ok || !tt.ok)
            continue;
        const double uP = field.values[idx];
        const double urr = d2_unequal(rr.vm, uP, rr.vp, rr.am, rr.ap, g.hr());
        const double ur = d1_unequal(rr.vm, uP, rr.vp, rr.am, rr.ap, g.hr());
        const double utt = d2_unequal(tt.vm, uP, tt.vp, tt.am, tt.ap, g.htheta());
        out.values[idx] = urr + drift * ur + utt / (sig * sig);
    }
    return out;
}

namespace {

// Assembled 5-point stencil, coefficients of L u (before the sign flip).
struct Stencil {
    double diagA = 0.0;             // diagonal of A = -L (the nk shift included)
    double c[4] = {0, 0, 0, 0};     // L-coefficients of the four neighbors
    int nb[4] = {-1, -1, -1, -1};   // flat neighbor index, -1 when the value is 0
};

std::vector<Stencil> assemble(const WarpedManifold& m, double k, const DomainMask& mask) {
    const Grid2D& g = mask.grid;
    std::vector<Stencil> st(g.total_nodes());
    for (int idx : mask.nodes) {
        const int i = g.node_i(idx);
        const double r = g.r(i);
        const double sig = m.sigma.eval(r, 0);
        const double drift = (m.n - 1) * m.sigma.eval(r, 1) / sig;
        const double hr = g.hr(), ht = g.htheta();

        Stencil& s = st[idx];
        const double aW = mask.frac[idx][dir_rm], aE = mask.frac[idx][dir_rp];
        const double aS = mask.frac[idx][dir_tm], aN = mask.frac[idx][dir_tp];

        const double rden = aW * aE * (aW + aE);
        s.c[dir_rm] = (2.0 * aE - drift * aE * aE * hr) / (rden * hr * hr);
        s.c[dir_rp] = (2.0 * aW + drift * aW * aW * hr) / (rden * hr * hr);
        double cP = (-2.0 * (aW + aE) + drift * (aE * aE - aW * aW) * hr) / (rden * hr * hr);

        const double isig2 = 1.0 / (sig * sig);
        const double tden = aS * aN * (aS + aN);
        s.c[dir_tm] = 2.0 * aN / (tden * ht * ht) * isig2;
        s.c[dir_tp] = 2.0 * aS / (tden * ht * ht) * isig2;
        cP += -2.0 / (aS * aN * ht * ht) * isig2;

        cP += m.n * k;
        s.diagA = -cP;
        if (!(s.diagA > 0.0))
            throw solver_error("solve_dirichlet: non-positive diagonal (k too large for this grid)");
        for (int d = 0; d < 4; ++d) {
            const int nb = mask.neighbor(idx, d);
            s.nb[d] = (!mask.has_cut(idx, d) && nb >= 0 && mask.is_inside(nb)) ? nb : -1;
        }
    }
    return st;
}

double stencil_apply(const Stencil& s, const std::vector<double>& u) {
    double acc = 0.0;
    for (int d = 0; d < 4; ++d)
        if (s.nb[d] >= 0)
            acc += s.c[d] * u[s.nb[d]];
    return acc;
}

// ||1 + L u||_2 / sqrt(N), accumulated per r-row and combined in row order
// so the value is independent of threading.
double residual_norm(const std::vector<Stencil>& st, const DomainMask& mask,
                     const std::vector<double>& u, int partitions) {
    const Grid2D& g = mask.grid;
    std::vector<double> row_sum(g.nr + 1, 0.0);
    const int rows = g.nr + 1;
#pragma omp parallel for schedule(static) num_threads(std::max(1, partitions)) if (partitions > 1)
    for (int i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (int j = 0; j < g.ntheta; ++j) {
            const int idx = g.node(i, j);
            if (!mask.is_inside(idx))
                continue;
            const Stencil& s = st[idx];
            const double res = 1.0 + (-s.diagA * u[idx] + stencil_apply(s, u));
            acc += res * res;
        }
        row_sum[i] = acc;
    }
    double total = 0.0;
    for (int i = 0; i < rows; ++i)
        total += row_sum[i];
    return std::sqrt(total / std::max(1, mask.count_inside()));
}

void sweep_color_serial(const std::vector<Stencil>& st, const std::vector<int>& list,
                        std::vector<double>& u, double omega) {
    for (int idx : list) {
        const Stencil& s = st[idx];
        const double gs = (1.0 + stencil_apply(s, u)) / s.diagA;
        u[idx] += omega * (gs - u[idx]);
    }
}

void sweep_color_parallel(const std::vector<Stencil>& st, const std::vector<int>& list,
                          std::vector<double>& u, double omega, int partitions) {
    const int n = static_cast<int>(list.size());
#pragma omp parallel for schedule(static) num_threads(partitions)
    for (int t = 0; t < n; ++t) {
        const int idx = list[t];
        const Stencil& s = st[idx];
        const double gs = (1.0 + stencil_apply(s, u)) / s.diagA;
        u[idx] += omega * (gs - u[idx]);
    }
}

double auto_omega(const DomainMask& mask) {
    const Grid2D& g = mask.grid;
    int imin = g.nr, imax = 0;
    std::vector<std::uint8_t> jused(g.ntheta, 0);
    for (int idx : mask.nodes) {
        imin = std::min(imin, g.node_i(idx));
        imax = std::max(imax, g.node_i(idx));
        jused[g.node_j(idx)] = 1;
    }
    int jcount = 0;
    for (auto b : jused)
        jcount += b;
    const int ni = std::max(3, imax - imin + 1);
    const int nj = std::max(3, jcount);
    const double rho = 0.5 * (std::cos(std::numbers::pi / ni) + std::cos(std::numbers::pi / nj));
    const double w = 2.0 / (1.0 + std::sqrt(std::max(0.0, 1.0 - rho * rho)));
    return std::clamp(w, 1.0, 1.95);
}

} // namespace

SolveResult solve_dirichlet(const WarpedManifold& m, double k, std::shared_ptr<const DomainMask> mask,
                            const SolveOptions& opts) {
    mask->require_solvable("solve_dirichlet");
    const DomainMask& M = *mask;
    const auto st = assemble(m, k, M);

    std::vector<int> red, black;
    red.reserve(M.nodes.size());
    black.reserve(M.nodes.size());
    for (int idx : M.nodes) {
        const int i = M.grid.node_i(idx), j = M.grid.node_j(idx);
        ((i + j) % 2 == 0 ? red : black).push_back(idx);
    }

    double omega = opts.omega > 0.0 ? opts.omega : auto_omega(M);
    const int parts = std::max(1, opts.partitions);

    ScalarField2D field(mask, 0.0);
    std::vector<double>& u = field.values;

    SolveResult out;
    double best = std::numeric_limits<double>::infinity();
    int restarts = 0;
    int sweeps = 0;
    double res = residual_norm(st, M, u, parts);
    while (res >= opts.tol && sweeps < opts.max_sweeps) {
        for (int it = 0; it < opts.check_every; ++it) {
            if (parts > 1) {
                sweep_color_parallel(st, red, u, omega, parts);
                sweep_color_parallel(st, black, u, omega, parts);
            } else {
                sweep_color_serial(st, red, u, omega);
                sweep_color_serial(st, black, u, omega);
            }
            ++sweeps;
        }
        res = residual_norm(st, M, u, parts);
        best = std::min(best, res);
        if (res > 10.0 * best && res > opts.tol) {
            // over-relaxation overshoot: retreat deterministically
            if (++restarts > 4)
                throw solver_error("solve_dirichlet: SOR diverged");
            omega = 1.0 + 0.5 * (omega - 1.0);
            std::fill(u.begin(), u.end(), 0.0);
            best = std::numeric_limits<double>::infinity();
            res = residual_norm(st, M, u, parts);
        }
    }
    if (res >= opts.tol) {
        std::ostringstream os;
        os << "solve_dirichlet: no convergence after " << sweeps << " sweeps (residual " << res
           << ", k = " << k << ", " << M.count_inside() << " nodes)";
        throw solver_error(os.str());
    }

    out.sweeps = sweeps;
    out.final_residual = res;
    double umin = std::numeric_limits<double>::infinity();
    for (int idx : M.nodes)
        umin = std::min(umin, u[idx]);
    out.positive_interior = umin > 0.0;
    out.flagged_indefinite = !(umin > 0.0);
    out.u = std::move(field);
    return out;
}

GradientFields discrete_gradient(const ScalarField2D& u, CutPolicy policy) {
    const DomainMask& mask = *u.mask;
    const Grid2D& g = mask.grid;
    GradientFields out{ScalarField2D(u.mask, kNaN), ScalarField2D(u.mask, kNaN)};

    auto one_sided = [&](int idx, int d_fwd, double h) -> double {
        // derivative pointing along +axis using nodes idx, idx+1, idx+2
        const int nb1 = mask.neighbor(idx, d_fwd);
        if (nb1 < 0 || !mask.is_inside(nb1))
            return kNaN;
        const int nb2 = mask.neighbor(nb1, d_fwd);
        if (nb2 >= 0 && mask.is_inside(nb2))
            return (-3.0 * u.values[idx] + 4.0 * u.values[nb1] - u.values[nb2]) / (2.0 * h);
        return (u.values[nb1] - u.values[idx]) / h;
    };

    // below this cut fraction the one-sided formula amplifies solver noise
    // by 1/frac; such grazing nodes carry no usable derivative
    constexpr double min_usable_frac = 0.01;

    for (int idx : mask.nodes) {
        double dr, dt;
        if (policy == CutPolicy::dirichlet_cut) {
            AxisSamples rr = axis_dirichlet(mask, u.values, idx, dir_rm, dir_rp);
            AxisSamples tt = axis_dirichlet(mask, u.values, idx, dir_tm, dir_tp);
            if (std::min(rr.am, rr.ap) < min_usable_frac)
                rr.ok = false;
            if (std::min(tt.am, tt.ap) < min_usable_frac)
                tt.ok = false;
            dr = rr.ok ? d1_unequal(rr.vm, u.values[idx], rr.vp, rr.am, rr.ap, g.hr()) : kNaN;
            dt = tt.ok ? d1_unequal(tt.vm, u.values[idx], tt.vp, tt.am, tt.ap, g.htheta()) : kNaN;
        } else {
            const int W = mask.neighbor(idx, dir_rm), E = mask.neighbor(idx, dir_rp);
            const bool win = W >= 0 && mask.is_inside(W), ein = E >= 0 && mask.is_inside(E);
            if (win && ein)
                dr = (u.values[E] - u.values[W]) / (2.0 * g.hr());
            else if (ein)
                dr = one_sided(idx, dir_rp, g.hr());
            else if (win)
                dr = -one_sided(idx, dir_rm, g.hr());
            else
                dr = kNaN;
            const int S = mask.neighbor(idx, dir_tm), N = mask.neighbor(idx, dir_tp);
            const bool sin_ = S >= 0 && mask.is_inside(S), nin = N >= 0 && mask.is_inside(N);
            if (sin_ && nin)
                dt = (u.values[N] - u.values[S]) / (2.0 * g.htheta());
            else if (nin)
                dt = one_sided(idx, dir_tp, g.htheta());
            else if (sin_)
                dt = -one_sided(idx, dir_tm, g.htheta());
            else
                dt = kNaN;
        }
        out.d_r.values[idx] = dr;
        out.d_theta.values[idx] = dt;
    }
    return out;
}

ScalarField2D gradient_norm(const WarpedManifold& m, const ScalarField2D& u, CutPolicy policy) {
    GradientFields gf = discrete_gradient(u, policy);
    ScalarField2D out(u.mask, kNaN);
    const Grid2D& g = u.mask->grid;
    for (int idx : u.mask->nodes) {
        const double sig = m.sigma.eval(g.r(g.node_i(idx)), 0);
        const double dr = gf.d_r.values[idx], dt = gf.d_theta.values[idx];
        out.values[idx] = std::sqrt(dr * dr + dt * dt / (sig * sig));
    }
    return out;
}

BoundaryGradientStats boundary_gradient_stats(const WarpedManifold& m, const ScalarField2D& u) {
    const DomainMask& mask = *u.mask;
    ScalarField2D gn = gradient_norm(m, u, CutPolicy::dirichlet_cut);

    BoundaryGradientStats stats;
    const int opposite[4] = {dir_rp, dir_rm, dir_tp, dir_tm};
    for (int idx : mask.nodes) {
        if (mask.cut_dirs[idx] == 0)
            continue;
        for (int d = 0; d < 4; ++d) {
            if (!mask.has_cut(idx, d))
                continue;
            if (!std::isfinite(gn.values[idx]))
                continue; // grazing node without a usable gradient
            const double a = mask.frac[idx][d];
            const int opp = mask.neighbor(idx, opposite[d]);
            double value = gn.values[idx];
            if (opp >= 0 && mask.is_inside(opp) && std::isfinite(gn.values[opp]))
                value = gn.values[idx] + a * (gn.values[idx] - gn.values[opp]);
            const auto [rb, tb] = mask.cut_point(idx, d);
            stats.samples.push_back({rb, tb, value});
        }
    }
    if (stats.samples.size() < 8)
        throw insufficient_resolution_error("boundary_gradient_stats: fewer than 8 boundary samples");

    double sum = 0.0;
    stats.min = std::numeric_limits<double>::infinity();
    stats.max = -stats.min;
    for (const auto& s : stats.samples) {
        sum += s.value;
        stats.min = std::min(stats.min, s.value);
        stats.max = std::max(stats.max, s.value);
    }
    stats.mean = sum / stats.samples.size();
    double var = 0.0;
    for (const auto& s : stats.samples)
        var += (s.value - stats.mean) * (s.value - stats.mean);
    stats.stddev = std::sqrt(var / stats.samples.size());
    return stats;
}

std::function<double(double, double)> closed_form_distance(const WarpedManifold& m, double r0,
                                                           double theta0) {
    const auto& fam = m.sigma.fam();
    if (const auto* c = std::get_if<family::Constant>(&fam)) {
        const double sig = c->c;
        return [r0, theta0, sig](double r, double t) {
            const double dt = wrap_angle(t - theta0);
            return std::hypot(r - r0, sig * dt);
        };
    }
    const auto* lin = std::get_if<family::Linear>(&fam);
    const auto* sm = std::get_if<family::ScaledModel>(&fam);
    const bool flat = (lin && lin->c1 == 0.0 && lin->c2 == 1.0) || (sm && sm->rho == 1.0 && sm->k == 0.0);
    if (flat) {
        return [r0, theta0](double r, double t) {
            const double c = std::cos(t - theta0);
            return std::sqrt(std::max(0.0, r * r + r0 * r0 - 2.0 * r * r0 * c));
        };
    }
    if (sm && sm->rho == 1.0 && sm->k < 0.0) {
        const double s = std::sqrt(-sm->k);
        return [r0, theta0, s](double r, double t) {
            const double arg = std::cosh(s * r) * std::cosh(s * r0) -
                               std::sinh(s * r) * std::sinh(s * r0) * std::cos(t - theta0);
            return std::acosh(std::max(1.0, arg)) / s;
        };
    }
    if (sm && sm->rho == 1.0 && sm->k > 0.0) {
        const double s = std::sqrt(sm->k);
        return [r0, theta0, s](double r, double t) {
            const double arg = std::cos(s * r) * std::cos(s * r0) +
                               std::sin(s * r) * std::sin(s * r0) * std::cos(t - theta0);
            return std::acos(std::clamp(arg, -1.0, 1.0)) / s;
        };
    }
    throw construction_error("closed_form_distance: chart is not a recognized space form");
}

DomainMask geodesic_ball_mask(const WarpedManifold& m, double r0, double theta0, double radius,
                              const Grid2D& grid, DistanceSource source) {
    if (!(radius >= 0.0))
        throw precondition_error("geodesic_ball_mask: radius must be nonnegative");
    if (!m.sigma.domain().contains(r0))
        throw precondition_error("geodesic_ball_mask: center outside chart");
    std::vector<double> level(grid.total_nodes());
    if (source == DistanceSource::exact) {
        auto dist = closed_form_distance(m, r0, theta0);
        for (int i = 0; i <= grid.nr; ++i)
            for (int j = 0; j < grid.ntheta; ++j)
                level[grid.node(i, j)] = dist(grid.r(i), grid.theta(j)) - radius;
    } else {
        ScalarField2D d = eikonal_distance(m, r0, theta0, grid);
        for (int idx = 0; idx < grid.total_nodes(); ++idx)
            level[idx] = d.values[idx] - radius;
    }
    const int ic = std::clamp(static_cast<int>(std::lround((r0 - grid.r_lo) / grid.hr())), 0, grid.nr);
    const int jc = ((static_cast<int>(std::lround(theta0 / grid.htheta())) % grid.ntheta) + grid.ntheta) %
                   grid.ntheta;
    DomainMask mask = mask_from_node_levels(grid, level, grid.node(ic, jc));
    if (mask.touches_chart_edge)
        throw chart_overflow_error("geodesic_ball_mask: ball touches the chart edge");
    return mask;
}

double integrate_masked(const WarpedManifold& m, const DomainMask& mask,
                        const std::function<double(int)>& integrand, int partitions) {
    const Grid2D& g = mask.grid;
    const int rows = g.nr + 1;
    std::vector<double> row_sum(rows, 0.0);
    const int parts = std::max(1, partitions);
#pragma omp parallel for schedule(static) num_threads(parts) if (parts > 1)
    for (int i = 0; i < rows; ++i) {
        double acc = 0.0;
        double wvol = 0.0;
        bool have_wvol = false;
        for (int j = 0; j < g.ntheta; ++j) {
            const int idx = g.node(i, j);
            const double w = mask.cell_weight(idx);
            if (w == 0.0)
                continue;
            if (!have_wvol) {
                wvol = std::pow(m.sigma.eval(g.r(i), 0), m.n - 1);
                have_wvol = true;
            }
            const double val = integrand(idx);
            if (!std::isfinite(val))
                continue; // sliver nodes outside the mask with no field data
            acc += w * val * wvol;
        }
        row_sum[i] = acc;
    }
    double total = 0.0;
    for (int i = 0; i < rows; ++i)
        total += row_sum[i];
    return total * g.hr() * g.htheta();
}

double masked_volume(const WarpedManifold& m, const DomainMask& mask) {
    return integrate_masked(m, mask, [](int) { return 1.0; });
}

} // namespace overwarp
