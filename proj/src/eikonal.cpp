#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include "overwarp/field2d.hpp"

namespace overwarp {

namespace {

enum State : std::uint8_t { far = 0, narrow = 1, accepted = 2 };

// One upwind axis contribution: the discrete derivative constraint
// w (x - b) with w = 1/h (first order) or w = 3/(2h), b = (4 U1 - U2)/3
// (second order when the next node along the characteristic is accepted).
struct AxisTerm {
    double w = 0.0;
    double b = 0.0;
    double u1 = std::numeric_limits<double>::infinity(); // nearest accepted value
    bool valid = false;
};

// Solves sum_i w_i^2 (x - b_i)^2 = 1 for the larger root.
bool solve_quadratic(const AxisTerm& a, const AxisTerm& t, double& x) {
    double A = 0.0, B = 0.0, C = -1.0;
    for (const AxisTerm* term : {&a, &t}) {
        if (!term->valid)
            continue;
        A += term->w * term->w;
        B += term->w * term->w * term->b;
        C += term->w * term->w * term->b * term->b;
    }
    if (A == 0.0)
        return false;
    const double disc = B * B - A * C;
    if (disc < 0.0)
        return false;
    x = (B + std::sqrt(disc)) / A;
    // causality: the new value must not undercut the data it uses
    if (a.valid && x < a.u1)
        return false;
    if (t.valid && x < t.u1)
        return false;
    return true;
}

} // namespace

ScalarField2D eikonal_distance(const WarpedManifold& m, double r0, double theta0, const Grid2D& grid) {
    if (!m.sigma.domain().contains(r0))
        throw precondition_error("eikonal_distance: center outside chart");
    const int total = grid.total_nodes();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(total, inf);
    std::vector<std::uint8_t> state(total, far);

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;

    // Seed the nodes around the (generally off-node) center with the local
    // metric distance; O(h^2) there, preserved by the march.
    const double seed_radius = 3.0 * std::max(grid.hr(), m.sigma.eval(r0, 0) * grid.htheta());
    for (int i = 0; i <= grid.nr; ++i) {
        const double r = grid.r(i);
        if (std::abs(r - r0) > seed_radius)
            continue;
        for (int j = 0; j < grid.ntheta; ++j) {
            const double dt = std::remainder(grid.theta(j) - theta0, 2.0 * std::numbers::pi);
            const double rbar = 0.5 * (r + r0);
            const double local = std::hypot(r - r0, m.sigma.eval(rbar, 0) * dt);
            if (local <= seed_radius) {
                const int idx = grid.node(i, j);
                d[idx] = local;
                state[idx] = narrow;
                heap.emplace(local, idx);
            }
        }
    }
    if (heap.empty())
        throw precondition_error("eikonal_distance: no seed nodes near center (grid too coarse)");

    // axis term along r (di = +-1) or theta (dj = +-1) for node (i, j)
    auto axis_term = [&](int i, int j, int di, int dj, double h_axis) {
        AxisTerm t;
        const int i1 = i + di;
        int j1 = j + dj;
        if (i1 < 0 || i1 > grid.nr)
            return t;
        if (dj != 0)
            j1 = (j1 + grid.ntheta) % grid.ntheta;
        const int n1 = grid.node(i1, j1);
        if (state[n1] != accepted)
            return t;
        t.valid = true;
        t.u1 = d[n1];
        const int i2 = i + 2 * di;
        int j2 = j + 2 * dj;
        if (dj != 0)
            j2 = (j2 + 2 * grid.ntheta) % grid.ntheta;
        if (i2 >= 0 && i2 <= grid.nr) {
            const int n2 = grid.node(i2, j2);
            if (state[n2] == accepted && d[n2] <= d[n1]) {
                t.w = 1.5 / h_axis;
                t.b = (4.0 * d[n1] - d[n2]) / 3.0;
                return t;
            }
        }
        t.w = 1.0 / h_axis;
        t.b = d[n1];
        return t;
    };

    auto update_node = [&](int nb) {
        const int i = grid.node_i(nb), j = grid.node_j(nb);
        const double sig = m.sigma.eval(grid.r(i), 0);
        const double hr = grid.hr(), ht = sig * grid.htheta();

        AxisTerm rm = axis_term(i, j, -1, 0, hr), rp = axis_term(i, j, 1, 0, hr);
        AxisTerm tm = axis_term(i, j, 0, -1, ht), tp = axis_term(i, j, 0, 1, ht);
        AxisTerm ar = (rm.valid && (!rp.valid || rm.u1 <= rp.u1)) ? rm : rp;
        AxisTerm at = (tm.valid && (!tp.valid || tm.u1 <= tp.u1)) ? tm : tp;

        double x = inf;
        bool ok = solve_quadratic(ar, at, x);
        if (!ok) {
            // retreat to first order on both axes
            AxisTerm ar1 = ar, at1 = at;
            if (ar1.valid) {
                ar1.w = 1.0 / hr;
                ar1.b = ar1.u1;
            }
            if (at1.valid) {
                at1.w = 1.0 / ht;
                at1.b = at1.u1;
            }
            ok = solve_quadratic(ar1, at1, x);
            if (!ok) {
                x = inf;
                if (ar1.valid)
                    x = std::min(x, ar1.u1 + hr);
                if (at1.valid)
                    x = std::min(x, at1.u1 + ht);
            }
        }
        if (x < d[nb]) {
            d[nb] = x;
            state[nb] = narrow;
            heap.emplace(x, nb);
        }
    };

    auto neighbor = [&grid](int idx, int dir) -> int {
        const int i = grid.node_i(idx), j = grid.node_j(idx);
        switch (dir) {
        case dir_rm: return i == 0 ? -1 : grid.node(i - 1, j);
        case dir_rp: return i == grid.nr ? -1 : grid.node(i + 1, j);
        case dir_tm: return grid.node(i, grid.jm(j));
        default: return grid.node(i, grid.jp(j));
        }
    };

    while (!heap.empty()) {
        const auto [val, idx] = heap.top();
        heap.pop();
        if (state[idx] == accepted || val > d[idx])
            continue;
        state[idx] = accepted;
        for (int dir = 0; dir < 4; ++dir) {
            const int nb = neighbor(idx, dir);
            if (nb >= 0 && state[nb] != accepted)
                update_node(nb);
        }
    }

    std::vector<double> all_inside(total, -1.0);
    auto mask = std::make_shared<DomainMask>(mask_from_node_levels(grid, all_inside));
    ScalarField2D out(std::move(mask));
    out.values = std::move(d);
    return out;
}

} // namespace overwarp
