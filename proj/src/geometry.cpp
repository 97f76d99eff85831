#include "overwarp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "overwarp/radial_profile.hpp"

namespace overwarp {

bool Interval::contains(double r) const {
    const bool above = closed_at_lo ? (r >= lo) : (r > lo);
    return above && r <= hi;
}

void Interval::validate() const {
    if (!(lo < hi))
        throw construction_error("Interval: lo must be < hi");
    if (closed_at_lo && lo != 0.0)
        throw construction_error("Interval: closed_at_lo requires lo = 0");
}

void Fiber::validate() const {
    if (dim < 1)
        throw construction_error("Fiber: dim must be >= 1");
    if (kind == FiberKind::round_sphere && ricci_lower_bound != 1.0)
        throw construction_error("Fiber: round sphere has ricci_lower_bound = 1");
    if ((kind == FiberKind::circle || kind == FiberKind::flat_torus) && ricci_lower_bound != 0.0)
        throw construction_error("Fiber: circle/flat torus have ricci_lower_bound = 0");
}

namespace {

// exp(-1/t) and its first three derivatives for the glued family, t > 0.
struct BumpTail {
    double phi, d1, d2, d3;
};

BumpTail bump_tail(double t) {
    BumpTail b{};
    if (t <= 0.0)
        return b;
    const double it = 1.0 / t;
    const double phi = std::exp(-it);
    b.phi = phi;
    b.d1 = phi * it * it;
    b.d2 = phi * (it * it * it * it - 2.0 * it * it * it);
    b.d3 = phi * (it * it * it * it * it * it - 6.0 * it * it * it * it * it + 6.0 * it * it * it * it);
    return b;
}

struct EvalVisitor {
    double r;
    int order;

    double operator()(const family::Linear& f) const {
        switch (order) {
        case 0: return f.c1 + f.c2 * r;
        case 1: return f.c2;
        default: return 0.0;
        }
    }
    double operator()(const family::Exponential& f) const {
        const double s = std::sqrt(-f.k);
        const double ep = std::exp(s * r), em = std::exp(-s * r);
        const double sig = f.c1 * ep + f.c2 * em;
        const double sig1 = s * (f.c1 * ep - f.c2 * em);
        switch (order) {
        case 0: return sig;
        case 1: return sig1;
        case 2: return -f.k * sig;
        default: return -f.k * sig1;
        }
    }
    double operator()(const family::Trigonometric& f) const {
        const double s = std::sqrt(f.k);
        const double c = std::cos(s * r), sn = std::sin(s * r);
        const double sig = f.c1 * c + f.c2 * sn;
        const double sig1 = s * (-f.c1 * sn + f.c2 * c);
        switch (order) {
        case 0: return sig;
        case 1: return sig1;
        case 2: return -f.k * sig;
        default: return -f.k * sig1;
        }
    }
    double operator()(const family::ScaledModel& f) const {
        const double sq = std::sqrt(f.rho);
        if (f.k == 0.0) {
            switch (order) {
            case 0: return sq * r;
            case 1: return sq;
            default: return 0.0;
            }
        }
        if (f.k < 0.0) {
            const double s = std::sqrt(-f.k);
            const double sig = sq * std::sinh(s * r) / s;
            const double sig1 = sq * std::cosh(s * r);
            switch (order) {
            case 0: return sig;
            case 1: return sig1;
            case 2: return -f.k * sig;
            default: return -f.k * sig1;
            }
        }
        const double s = std::sqrt(f.k);
        const double sig = sq * std::sin(s * r) / s;
        const double sig1 = sq * std::cos(s * r);
        switch (order) {
        case 0: return sig;
        case 1: return sig1;
        case 2: return -f.k * sig;
        default: return -f.k * sig1;
        }
    }
    double operator()(const family::Glued& f) const {
        if (r <= f.b) {
            switch (order) {
            case 0: return r;
            case 1: return 1.0;
            default: return 0.0;
            }
        }
        const BumpTail b = bump_tail(r - f.b);
        switch (order) {
        case 0: return r * (1.0 - b.phi);
        case 1: return (1.0 - b.phi) - r * b.d1;
        case 2: return -2.0 * b.d1 - r * b.d2;
        default: return -3.0 * b.d2 - r * b.d3;
        }
    }
    double operator()(const family::Constant& f) const { return order == 0 ? f.c : 0.0; }
    double operator()(const family::Tabulated& f) const {
        const int n = static_cast<int>(f.values.size());
        if (n < 4)
            throw construction_error("Tabulated warping function needs at least 4 samples");
        if (order == 3) {
            // centered difference of sigma''; reduced accuracy by design
            const double lo = f.r0, hi = f.r0 + (n - 1) * f.h;
            const double d = f.h;
            const double rp = std::min(r + d, hi), rm = std::max(r - d, lo);
            const EvalVisitor v2p{rp, 2}, v2m{rm, 2};
            return (v2p(f) - v2m(f)) / (rp - rm);
        }
        int i = static_cast<int>(std::floor((r - f.r0) / f.h));
        i = std::clamp(i, 1, n - 3);
        const double s = (r - (f.r0 + i * f.h)) / f.h;
        const double y0 = f.values[i - 1], y1 = f.values[i], y2 = f.values[i + 1], y3 = f.values[i + 2];
        if (order == 0) {
            const double l0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
            const double l1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
            const double l2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
            const double l3 = (s + 1.0) * s * (s - 1.0) / 6.0;
            return y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3;
        }
        if (order == 1) {
            const double l0 = -(3.0 * s * s - 6.0 * s + 2.0) / 6.0;
            const double l1 = (3.0 * s * s - 4.0 * s - 1.0) / 2.0;
            const double l2 = -(3.0 * s * s - 2.0 * s - 2.0) / 2.0;
            const double l3 = (3.0 * s * s - 1.0) / 6.0;
            return (y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3) / f.h;
        }
        const double l0 = 1.0 - s;
        const double l1 = 3.0 * s - 2.0;
        const double l2 = 1.0 - 3.0 * s;
        const double l3 = s;
        return (y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3) / (f.h * f.h);
    }
};

} // namespace

WarpingFunction::WarpingFunction(family::Any fam, Interval domain)
    : family_(std::move(fam)), domain_(domain) {
    domain_.validate();
    if (const auto* e = std::get_if<family::Exponential>(&family_); e && e->k >= 0.0)
        throw construction_error("Exponential family requires k < 0");
    if (const auto* t = std::get_if<family::Trigonometric>(&family_); t && t->k <= 0.0)
        throw construction_error("Trigonometric family requires k > 0");
    if (const auto* s = std::get_if<family::ScaledModel>(&family_); s && s->rho <= 0.0)
        throw construction_error("ScaledModel family requires rho > 0");
    if (const auto* g = std::get_if<family::Glued>(&family_)) {
        if (!(0.0 < g->a && g->a < g->b) || g->eps <= 0.0)
            throw construction_error("Glued family requires 0 < a < b and eps > 0");
    }
    if (const auto* t = std::get_if<family::Tabulated>(&family_)) {
        if (t->h <= 0.0 || t->values.size() < 4)
            throw construction_error("Tabulated family requires h > 0 and >= 4 samples");
    }
}

WarpingFunction WarpingFunction::linear(double c1, double c2, Interval domain) {
    return {family::Linear{c1, c2}, domain};
}
WarpingFunction WarpingFunction::exponential(double c1, double c2, double k, Interval domain) {
    return {family::Exponential{c1, c2, k}, domain};
}
WarpingFunction WarpingFunction::trigonometric(double c1, double c2, double k, Interval domain) {
    return {family::Trigonometric{c1, c2, k}, domain};
}
WarpingFunction WarpingFunction::scaled_model(double rho, double k, Interval domain) {
    return {family::ScaledModel{rho, k}, domain};
}
WarpingFunction WarpingFunction::glued(double a, double b, double eps) {
    return {family::Glued{a, b, eps}, Interval{a, b + eps, false}};
}
WarpingFunction WarpingFunction::constant(double c, Interval domain) {
    return {family::Constant{c}, domain};
}
WarpingFunction WarpingFunction::tabulated(double r0, double h, std::vector<double> values, Interval domain) {
    return {family::Tabulated{r0, h, std::move(values)}, domain};
}

double WarpingFunction::eval(double r, int order) const {
    if (order < 0 || order > 3)
        throw precondition_error("WarpingFunction::eval: order must be in {0,1,2,3}");
    if (!domain_.contains(r)) {
        std::ostringstream os;
        os << "WarpingFunction::eval: r = " << r << " outside domain ["
           << domain_.lo << ", " << domain_.hi << ")";
        throw domain_error(os.str());
    }
    return eval_unchecked(r, order);
}

double WarpingFunction::eval_unchecked(double r, int order) const {
    return std::visit(EvalVisitor{r, order}, family_);
}

std::string WarpingFunction::family_name() const {
    struct V {
        std::string operator()(const family::Linear&) const { return "linear"; }
        std::string operator()(const family::Exponential&) const { return "exponential"; }
        std::string operator()(const family::Trigonometric&) const { return "trigonometric"; }
        std::string operator()(const family::ScaledModel&) const { return "scaled_model"; }
        std::string operator()(const family::Glued&) const { return "glued"; }
        std::string operator()(const family::Constant&) const { return "constant"; }
        std::string operator()(const family::Tabulated&) const { return "tabulated"; }
    };
    return std::visit(V{}, family_);
}

std::optional<double> WarpingFunction::natural_curvature() const {
    struct V {
        std::optional<double> operator()(const family::Linear&) const { return 0.0; }
        std::optional<double> operator()(const family::Exponential& f) const { return f.k; }
        std::optional<double> operator()(const family::Trigonometric& f) const { return f.k; }
        std::optional<double> operator()(const family::ScaledModel& f) const { return f.k; }
        std::optional<double> operator()(const family::Glued&) const { return std::nullopt; }
        std::optional<double> operator()(const family::Constant&) const { return 0.0; }
        std::optional<double> operator()(const family::Tabulated&) const { return std::nullopt; }
    };
    return std::visit(V{}, family_);
}

std::optional<double> WarpingFunction::first_integral() const {
    struct V {
        std::optional<double> operator()(const family::Linear& f) const { return f.c2 * f.c2; }
        std::optional<double> operator()(const family::Exponential& f) const { return 4.0 * f.k * f.c1 * f.c2; }
        std::optional<double> operator()(const family::Trigonometric& f) const {
            return f.k * (f.c1 * f.c1 + f.c2 * f.c2);
        }
        std::optional<double> operator()(const family::ScaledModel& f) const { return f.rho; }
        std::optional<double> operator()(const family::Glued&) const { return std::nullopt; }
        std::optional<double> operator()(const family::Constant&) const { return 0.0; }
        std::optional<double> operator()(const family::Tabulated&) const { return std::nullopt; }
    };
    return std::visit(V{}, family_);
}

bool WarpingFunction::third_derivative_reduced_accuracy() const {
    return std::holds_alternative<family::Tabulated>(family_);
}

void WarpingFunction::check_positive(int n_samples) const {
    const double lo = domain_.lo, hi = domain_.hi;
    for (int i = 0; i < n_samples; ++i) {
        const double r = lo + (i + 0.5) * (hi - lo) / n_samples;
        if (!(eval_unchecked(r, 0) > 0.0)) {
            std::ostringstream os;
            os << "warping function " << family_name() << " violates sigma > 0 at r = " << r;
            throw construction_error(os.str());
        }
    }
}

WarpedManifold::WarpedManifold(int n_, WarpingFunction sigma_, Fiber fiber_, double k_)
    : n(n_), sigma(std::move(sigma_)), fiber(fiber_), k(k_) {
    if (n < 2)
        throw construction_error("WarpedManifold: n must be >= 2");
    fiber.validate();
    if (fiber.dim != n - 1)
        throw construction_error("WarpedManifold: fiber.dim must equal n - 1");
    sigma.domain().validate();
    sigma.check_positive();
}

double sigma_eval(const WarpingFunction& w, double r, int order) { return w.eval(r, order); }

RicciEigenvalues ricci_eigenvalue_bounds(const WarpedManifold& m, double r) {
    const int n = m.n;
    const double rho = m.fiber.ricci_lower_bound;
    const auto knat = m.sigma.natural_curvature();
    const auto kappa = m.sigma.first_integral();
    if (knat && kappa) {
        // sigma'' = -k sigma and sigma'^2 + k sigma^2 = kappa exactly, so
        // both eigenvalues reduce to (n-1)k plus a fiber mismatch term.
        const double sig = m.sigma.eval(r, 0);
        const double kf = *knat;
        RicciEigenvalues out{};
        out.radial = (n - 1) * kf;
        out.tangential_lower = (n - 2) * (rho - *kappa) / (sig * sig) + (n - 1) * kf;
        return out;
    }
    const double sig = m.sigma.eval(r, 0);
    const double sig1 = m.sigma.eval(r, 1);
    const double sig2 = m.sigma.eval(r, 2);
    RicciEigenvalues out{};
    out.radial = -(n - 1) * sig2 / sig;
    out.tangential_lower = ((n - 2) * rho - sig * sig2 - (n - 2) * sig1 * sig1) / (sig * sig);
    return out;
}

double check_ricci_bound(const WarpedManifold& m, double k, int n_samples) {
    if (n_samples < 2)
        throw precondition_error("check_ricci_bound: n_samples must be >= 2");
    const Interval& dom = m.sigma.domain();
    if (!(dom.length() > 0.0))
        throw domain_error("check_ricci_bound: empty domain");
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
        const double r = dom.lo + (i + 0.5) * dom.length() / n_samples;
        const RicciEigenvalues ev = ricci_eigenvalue_bounds(m, r);
        margin = std::min(margin, std::min(ev.radial, ev.tangential_lower) - (m.n - 1) * k);
    }
    return margin;
}

double serrin_coefficient(const WarpedManifold& m, double k, double r) {
    const double sig = m.sigma.eval(r, 0);
    if (!(sig > 0.0))
        throw domain_error("serrin_coefficient: sigma(r) must be positive");
    const double sig1 = m.sigma.eval(r, 1);
    const double sig2 = m.sigma.eval(r, 2);
    const double sig3 = m.sigma.eval(r, 3);
    return k * sig1 + (sig3 * sig + (m.n - 1) * sig2 * sig1) / (m.n * sig);
}

double laplacian_radial(const WarpedManifold& m, const RadialProfile& u, double r) {
    if (r == 0.0) {
        if (!m.is_model())
            throw domain_error("laplacian_radial: r = 0 is not in the chart of a non-model manifold");
        return m.n * u.second_deriv(0.0);
    }
    const double sig = m.sigma.eval(r, 0);
    const double sig1 = m.sigma.eval(r, 1);
    return u.second_deriv(r) + (m.n - 1) * (sig1 / sig) * u.deriv(r);
}

HessianComponents radial_hessian_components(const WarpedManifold& m, const RadialProfile& u, double r) {
    const double sig = m.sigma.eval(r, 0);
    if (sig == 0.0)
        throw domain_error("radial_hessian_components: sigma(r) = 0 is singular");
    const double sig1 = m.sigma.eval(r, 1);
    return {u.second_deriv(r), u.deriv(r) * sig1 / sig};
}

} // namespace overwarp
