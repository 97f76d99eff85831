#include "overwarp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

namespace overwarp {

Grid2D::Grid2D(double r_lo_, double r_hi_, int nr_, int ntheta_)
    : r_lo(r_lo_), r_hi(r_hi_), nr(nr_), ntheta(ntheta_) {
    if (!(r_lo < r_hi) || nr < 1)
        throw construction_error("Grid2D: need r_lo < r_hi and nr >= 1");
    if (ntheta < 4 || ntheta % 2 != 0)
        throw construction_error("Grid2D: ntheta must be even and >= 4");
}

double Grid2D::htheta() const { return 2.0 * std::numbers::pi / ntheta; }

int DomainMask::neighbor(int idx, int d) const {
    const int i = grid.node_i(idx), j = grid.node_j(idx);
    switch (d) {
    case dir_rm: return i == 0 ? -1 : grid.node(i - 1, j);
    case dir_rp: return i == grid.nr ? -1 : grid.node(i + 1, j);
    case dir_tm: return grid.node(i, grid.jm(j));
    default: return grid.node(i, grid.jp(j));
    }
}

namespace {

// Inside-area fraction of a square with level values at its corners in
// cyclic order, boundary from linear interpolation along the edges.
double square_inside_fraction(double a, double b, double c, double d) {
    const bool ia = a < 0.0, ib = b < 0.0, ic = c < 0.0, id = d < 0.0;
    const int count = ia + ib + ic + id;
    auto t = [](double p, double q) { return p / (p - q); };
    auto corner = [&](double p, double prev, double next) { return 0.5 * t(p, prev) * t(p, next); };
    if (count == 0)
        return 0.0;
    if (count == 4)
        return 1.0;
    if (count == 1) {
        if (ia)
            return corner(a, d, b);
        if (ib)
            return corner(b, a, c);
        if (ic)
            return corner(c, b, d);
        return corner(d, c, a);
    }
    if (count == 3) {
        if (!ia)
            return 1.0 - corner(a, d, b);
        if (!ib)
            return 1.0 - corner(b, a, c);
        if (!ic)
            return 1.0 - corner(c, b, d);
        return 1.0 - corner(d, c, a);
    }
    // two inside: adjacent pairs make a trapezoid, diagonal pairs split on
    // the center value
    if (ia && ib)
        return 0.5 * (t(a, d) + t(b, c));
    if (ib && ic)
        return 0.5 * (t(b, a) + t(c, d));
    if (ic && id)
        return 0.5 * (t(c, b) + t(d, a));
    if (id && ia)
        return 0.5 * (t(d, c) + t(a, b));
    const double center = 0.25 * (a + b + c + d);
    if (ia && ic) {
        if (center < 0.0)
            return 1.0 - corner(b, a, c) - corner(d, c, a);
        return corner(a, d, b) + corner(c, b, d);
    }
    if (center < 0.0)
        return 1.0 - corner(a, d, b) - corner(c, b, d);
    return corner(b, a, c) + corner(d, c, a);
}

} // namespace

double DomainMask::cell_weight(int idx) const {
    // Marching-squares area of the node's dual cell, one quadrant at a
    // time; corner levels come from bilinear averages of the stored nodal
    // level values, so the reconstructed boundary is second-order accurate.
    if (level.empty())
        return is_inside(idx) ? 1.0 : 0.0;
    const int i = grid.node_i(idx), j = grid.node_j(idx);
    const double L0 = level[idx];
    auto node_level = [&](int ii, int jj) -> double {
        if (ii < 0 || ii > grid.nr)
            return L0; // chart edge: extend flat
        jj = (jj % grid.ntheta + grid.ntheta) % grid.ntheta;
        return level[grid.node(ii, jj)];
    };
    double total = 0.0;
    for (int sr : {-1, 1}) {
        for (int st : {-1, 1}) {
            const double Lr = 0.5 * (L0 + node_level(i + sr, j));
            const double Lt = 0.5 * (L0 + node_level(i, j + st));
            const double Lc = 0.25 * (L0 + node_level(i + sr, j) + node_level(i, j + st) +
                                      node_level(i + sr, j + st));
            total += square_inside_fraction(L0, Lr, Lc, Lt);
        }
    }
    return 0.25 * total;
}

std::pair<double, double> DomainMask::cut_point(int idx, int d) const {
    const int i = grid.node_i(idx), j = grid.node_j(idx);
    const double a = frac[idx][d];
    double r = grid.r(i), t = grid.theta(j);
    switch (d) {
    case dir_rm: r -= a * grid.hr(); break;
    case dir_rp: r += a * grid.hr(); break;
    case dir_tm: t -= a * grid.htheta(); break;
    default: t += a * grid.htheta(); break;
    }
    return {r, t};
}

void DomainMask::require_solvable(const char* who) const {
    if (nodes.empty())
        throw precondition_error(std::string(who) + ": mask is empty");
    if (touches_chart_edge)
        throw chart_overflow_error(std::string(who) + ": mask reaches the r-chart edge");
}

namespace {

void finish_mask(DomainMask& m, const std::vector<double>& level) {
    const Grid2D& g = m.grid;
    const int total = g.total_nodes();
    m.cut_dirs.assign(total, 0);
    m.frac.assign(total, {1.0, 1.0, 1.0, 1.0});
    m.nodes.clear();
    m.touches_chart_edge = false;

    constexpr double min_frac = 1e-6;
    for (int idx = 0; idx < total; ++idx) {
        if (!m.inside[idx])
            continue;
        m.nodes.push_back(idx);
        const int i = g.node_i(idx);
        if (i == 0 || i == g.nr) {
            m.touches_chart_edge = true;
            continue;
        }
        for (int d = 0; d < 4; ++d) {
            const int nb = m.neighbor(idx, d);
            if (nb >= 0 && m.inside[nb])
                continue;
            m.cut_dirs[idx] |= static_cast<std::uint8_t>(1u << d);
            double a = 1.0;
            if (nb >= 0 && !level.empty()) {
                const double fp = level[idx], fq = level[nb];
                if (fq > fp)
                    a = std::clamp(fp / (fp - fq), min_frac, 1.0);
            }
            m.frac[idx][d] = a;
        }
    }

    // 4-connectivity check over the inside set
    if (!m.nodes.empty()) {
        std::vector<std::uint8_t> seen(total, 0);
        std::queue<int> q;
        q.push(m.nodes.front());
        seen[m.nodes.front()] = 1;
        int reached = 0;
        while (!q.empty()) {
            const int idx = q.front();
            q.pop();
            ++reached;
            for (int d = 0; d < 4; ++d) {
                const int nb = m.neighbor(idx, d);
                if (nb >= 0 && m.inside[nb] && !seen[nb]) {
                    seen[nb] = 1;
                    q.push(nb);
                }
            }
        }
        if (reached != m.count_inside())
            throw construction_error("DomainMask: inside set is not 4-connected");
    }
}

} // namespace

DomainMask mask_from_node_levels(const Grid2D& grid, const std::vector<double>& level,
                                 int keep_component_seed) {
    if (static_cast<int>(level.size()) != grid.total_nodes())
        throw precondition_error("mask_from_node_levels: level size mismatch");
    DomainMask m;
    m.grid = grid;
    m.level = level;
    m.inside.resize(level.size());
    // nodes the boundary grazes to roundoff count as boundary, not interior
    for (std::size_t idx = 0; idx < level.size(); ++idx)
        m.inside[idx] = level[idx] < -1e-12 ? 1 : 0;
    if (keep_component_seed >= 0) {
        int seed = -1;
        if (m.inside[keep_component_seed]) {
            seed = keep_component_seed;
        } else {
            // nearest inside node in level value, i.e. deepest below zero
            double best = 0.0;
            for (std::size_t idx = 0; idx < level.size(); ++idx)
                if (m.inside[idx] && level[idx] < best) {
                    best = level[idx];
                    seed = static_cast<int>(idx);
                }
        }
        if (seed >= 0) {
            std::vector<std::uint8_t> keep(level.size(), 0);
            std::queue<int> q;
            q.push(seed);
            keep[seed] = 1;
            while (!q.empty()) {
                const int idx = q.front();
                q.pop();
                for (int d = 0; d < 4; ++d) {
                    const int nb = m.neighbor(idx, d);
                    if (nb >= 0 && m.inside[nb] && !keep[nb]) {
                        keep[nb] = 1;
                        q.push(nb);
                    }
                }
            }
            for (std::size_t idx = 0; idx < level.size(); ++idx)
                if (m.inside[idx] && !keep[idx]) {
                    m.inside[idx] = 0;
                    m.level[idx] = std::abs(m.level[idx]); // drop speck area too
                }
        }
    }
    finish_mask(m, level);
    return m;
}

DomainMask mask_from_implicit(const Grid2D& grid, const std::function<double(double, double)>& level) {
    std::vector<double> values(grid.total_nodes());
    for (int i = 0; i <= grid.nr; ++i)
        for (int j = 0; j < grid.ntheta; ++j)
            values[grid.node(i, j)] = level(grid.r(i), grid.theta(j));
    return mask_from_node_levels(grid, values);
}

DomainMask band_mask(const Grid2D& grid, double w) {
    if (!(w > 0.0))
        throw construction_error("band_mask: w must be positive");
    return mask_from_implicit(grid, [w](double r, double) { return std::abs(r) - w; });
}

ScalarField2D::ScalarField2D(std::shared_ptr<const DomainMask> m, double fill)
    : mask(std::move(m)), values(mask->grid.total_nodes(), fill) {}

} // namespace overwarp
