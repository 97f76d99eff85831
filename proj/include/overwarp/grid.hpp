#ifndef OVERWARP_GRID_HPP
#define OVERWARP_GRID_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "overwarp/errors.hpp"

namespace overwarp {

/// Node-centered (r, theta) grid.  r spans [r_lo, r_hi] with nr cells
/// (nr + 1 node lines); theta is periodic on [0, 2 pi) with ntheta nodes.
/// ntheta must be even so that red-black coloring stays consistent across
/// the periodic seam.
struct Grid2D {
    double r_lo = 0.0;
    double r_hi = 1.0;
    int nr = 1;
    int ntheta = 4;

    Grid2D() = default;
    Grid2D(double r_lo_, double r_hi_, int nr_, int ntheta_);

    double hr() const { return (r_hi - r_lo) / nr; }
    double htheta() const;
    double r(int i) const { return r_lo + i * hr(); }
    double theta(int j) const { return j * htheta(); }
    int total_nodes() const { return (nr + 1) * ntheta; }
    int node(int i, int j) const { return i * ntheta + j; }
    int node_i(int idx) const { return idx / ntheta; }
    int node_j(int idx) const { return idx % ntheta; }
    int jm(int j) const { return j == 0 ? ntheta - 1 : j - 1; }
    int jp(int j) const { return j == ntheta - 1 ? 0 : j + 1; }
};

/// Neighbor directions used by masks and stencils.
enum Dir : int { dir_rm = 0, dir_rp = 1, dir_tm = 2, dir_tp = 3 };

/// Masked subdomain with Shortley-Weller cut data: for each inside node
/// adjacent to an outside node, the fractional distance (in units of the
/// grid spacing) along the edge to the boundary.
struct DomainMask {
    Grid2D grid;
    std::vector<std::uint8_t> inside;        // per node
    std::vector<std::uint8_t> cut_dirs;      // bit d set when neighbor in d is outside
    std::vector<std::array<double, 4>> frac; // cut fractions, 1.0 when no cut
    std::vector<int> nodes;                  // inside node indices, ascending
    std::vector<double> level;               // defining level values (quadrature geometry)
    bool touches_chart_edge = false;

    bool is_inside(int idx) const { return inside[idx] != 0; }
    bool has_cut(int idx, int d) const { return (cut_dirs[idx] >> d) & 1; }
    int neighbor(int idx, int d) const;
    int count_inside() const { return static_cast<int>(nodes.size()); }

    /// First-order cut-cell quadrature weight of the node's cell.
    double cell_weight(int idx) const;

    /// Chart coordinates of the boundary point cut along direction d.
    std::pair<double, double> cut_point(int idx, int d) const;

    void require_solvable(const char* who) const;
};

/// Builds a mask from an implicit function: inside where level(r, theta) < 0.
/// Cut fractions come from linear interpolation of the level values along
/// grid edges.  Throws construction_error if the inside set is empty-valid
/// but disconnected.
DomainMask mask_from_implicit(const Grid2D& grid, const std::function<double(double, double)>& level);

/// Same construction from precomputed nodal level values.  When
/// keep_component_seed >= 0, components not containing that node are
/// discarded instead of failing the connectivity check (distance-field
/// sublevel sets can shed one-node specks at the resolution limit).
DomainMask mask_from_node_levels(const Grid2D& grid, const std::vector<double>& level,
                                 int keep_component_seed = -1);

/// Symmetric band |r| < w on a cylinder-type chart.
DomainMask band_mask(const Grid2D& grid, double w);

/// Field of one value per grid node; meaningful on the mask's inside set
/// (NaN or 0 elsewhere by convention of the producing operation).
struct ScalarField2D {
    std::shared_ptr<const DomainMask> mask;
    std::vector<double> values;

    ScalarField2D() = default;
    explicit ScalarField2D(std::shared_ptr<const DomainMask> m, double fill = 0.0);

    double& at(int idx) { return values[idx]; }
    double at(int idx) const { return values[idx]; }
    const Grid2D& grid() const { return mask->grid; }
};

struct BoundaryGradientStats {
    struct Sample {
        double r, theta, value;
    };
    std::vector<Sample> samples;
    double mean = 0.0, stddev = 0.0, min = 0.0, max = 0.0;

    double relative_defect() const { return mean != 0.0 ? stddev / mean : 0.0; }
};

} // namespace overwarp

#endif
