#include "overwarp/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace overwarp {

Grid2D frame_grid(const WarpedManifold& m, double r_lo, double r_hi, double h) {
    const Interval dom = m.sigma.domain();
    if (!(r_lo < r_hi) || r_lo <= dom.lo || r_hi >= dom.hi)
        throw chart_overflow_error("frame_grid: requested r-range leaves the chart");
    const int nr = std::max(8, static_cast<int>(std::ceil((r_hi - r_lo) / h)));
    double sig_max = 0.0;
    for (int i = 0; i <= 32; ++i)
        sig_max = std::max(sig_max, m.sigma.eval(r_lo + (r_hi - r_lo) * i / 32.0, 0));
    int ntheta = static_cast<int>(std::ceil(2.0 * std::numbers::pi * sig_max / h));
    ntheta += ntheta % 2;
    ntheta = std::max(ntheta, 16);
    return Grid2D(r_lo, r_hi, nr, ntheta);
}

Grid2D frame_ball_grid(const WarpedManifold& m, double r0, double radius, double h) {
    const Interval dom = m.sigma.domain();
    const double lo_gap = r0 - radius - dom.lo;
    const double hi_gap = dom.hi - (r0 + radius);
    if (!(lo_gap > 0.0) || !(hi_gap > 0.0))
        throw chart_overflow_error("frame_ball_grid: ball does not fit the chart interior");
    const double pad = 0.1 * radius + 4.0 * h;
    // shrink the padding rather than leave the chart; the mask keeps a
    // positive margin to the grid edge either way
    const double r_lo = std::max(dom.lo + 0.2 * lo_gap, r0 - radius - pad);
    const double r_hi = std::min(dom.hi - 0.2 * hi_gap, r0 + radius + pad);
    return frame_grid(m, r_lo, r_hi, h);
}

std::shared_ptr<const DomainMask> ball_mask(const WarpedManifold& m, double r0, double theta0,
                                            double radius, double h, DistanceSource source) {
    Grid2D g = frame_ball_grid(m, r0, radius, h);
    return std::make_shared<const DomainMask>(geodesic_ball_mask(m, r0, theta0, radius, g, source));
}

std::shared_ptr<const DomainMask> ellipse_mask(const WarpedManifold& m, double a, double b, double x0,
                                               double h) {
    const double reach = std::max(a, b);
    Grid2D g = frame_grid(m, x0 - reach - 0.1 * reach - 4.0 * h, x0 + reach + 0.1 * reach + 4.0 * h, h);
    return std::make_shared<const DomainMask>(mask_from_implicit(g, [=](double r, double t) {
        const double x = r * std::cos(t) - x0, y = r * std::sin(t);
        return x * x / (a * a) + y * y / (b * b) - 1.0;
    }));
}

std::shared_ptr<const DomainMask> band_mask_for(const WarpedManifold& m, double w, double h,
                                                int ntheta) {
    const Interval dom = m.sigma.domain();
    // keep nodes on multiples of h so a band edge at a grid-aligned w is
    // resolved exactly
    const int half_cells = static_cast<int>(std::ceil((1.2 * w + 4.0 * h) / h));
    const double ext = half_cells * h;
    if (!(-ext > dom.lo && ext < dom.hi))
        throw chart_overflow_error("band_mask_for: band does not fit the chart");
    Grid2D g(-ext, ext, 2 * half_cells, ntheta);
    return std::make_shared<const DomainMask>(band_mask(g, w));
}

} // namespace overwarp
