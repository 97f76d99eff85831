#include "overwarp/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace overwarp {

const char* hypothesis_name(Hypothesis h) {
    switch (h) {
    case Hypothesis::sigma_positive: return "sigma_positive";
    case Hypothesis::sigma_prime_nonneg: return "sigma_prime_nonneg";
    case Hypothesis::sigma_prime_not_ident_zero: return "sigma_prime_not_ident_zero";
    case Hypothesis::ricci_bound: return "ricci_bound";
    case Hypothesis::serrin_coefficient_zero: return "serrin_coefficient_zero";
    case Hypothesis::model_smooth_at_pole: return "model_smooth_at_pole";
    case Hypothesis::compatibility_trivial: return "compatibility_trivial";
    }
    return "?";
}

double CatalogEntry::margin(Hypothesis h) const {
    auto it = margins.find(h);
    if (it == margins.end())
        throw precondition_error(std::string("hypothesis not satisfied: ") + hypothesis_name(h));
    return it->second;
}

namespace {

double get(const ParameterMap& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

constexpr int kSamples = 1000;

double max_abs_serrin(const WarpedManifold& m, double k, double lo, double hi) {
    double worst = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const double r = lo + (i + 0.5) * (hi - lo) / kSamples;
        worst = std::max(worst, std::abs(serrin_coefficient(m, k, r)));
    }
    return worst;
}

// Re-checks every hypothesis the entry can claim and records the measured
// witnesses.  `compat_lo/hi` restrict the compatibility check to the
// subinterval where the entry's construction promises a vanishing
// coefficient (the glued example only inside (a, b)).
CatalogEntry finish_entry(std::string name, WarpedManifold m, double ricci_tol, double compat_lo,
                          double compat_hi) {
    CatalogEntry e{std::move(name), std::move(m), {}};
    const Interval dom = e.manifold.sigma.domain();

    double min_sigma = std::numeric_limits<double>::infinity();
    double min_dsigma = std::numeric_limits<double>::infinity();
    double max_abs_dsigma = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const double r = dom.lo + (i + 0.5) * dom.length() / kSamples;
        min_sigma = std::min(min_sigma, e.manifold.sigma.eval(r, 0));
        const double d = e.manifold.sigma.eval(r, 1);
        min_dsigma = std::min(min_dsigma, d);
        max_abs_dsigma = std::max(max_abs_dsigma, std::abs(d));
    }
    if (min_sigma > 0.0)
        e.margins[Hypothesis::sigma_positive] = min_sigma;
    if (min_dsigma >= -1e-12)
        e.margins[Hypothesis::sigma_prime_nonneg] = min_dsigma;
    if (max_abs_dsigma > 1e-8)
        e.margins[Hypothesis::sigma_prime_not_ident_zero] = max_abs_dsigma;

    const double ricci_margin = check_ricci_bound(e.manifold, e.manifold.k, kSamples);
    if (ricci_margin >= -ricci_tol)
        e.margins[Hypothesis::ricci_bound] = ricci_margin;

    const double serrin_full = max_abs_serrin(e.manifold, e.manifold.k, dom.lo, dom.hi);
    if (serrin_full < 1e-10)
        e.margins[Hypothesis::serrin_coefficient_zero] = serrin_full;

    const double serrin_compat = (compat_lo == dom.lo && compat_hi == dom.hi)
                                     ? serrin_full
                                     : max_abs_serrin(e.manifold, e.manifold.k, compat_lo, compat_hi);
    if (serrin_compat < 1e-10)
        e.margins[Hypothesis::compatibility_trivial] = serrin_compat;

    if (dom.closed_at_lo) {
        const double d0 = std::abs(e.manifold.sigma.eval(0.0, 0));
        const double d1 = std::abs(e.manifold.sigma.eval(0.0, 1) - 1.0);
        const double d2 = std::abs(e.manifold.sigma.eval(0.0, 2));
        const double dev = std::max({d0, d1, d2});
        if (dev < 1e-10)
            e.margins[Hypothesis::model_smooth_at_pole] = dev;
    }
    return e;
}

} // namespace

CatalogEntry build_entry(const std::string& name, const ParameterMap& params) {
    const int n = static_cast<int>(get(params, "n", 2));
    const int fiber_dim = n - 1;

    if (name == "space_form") {
        const double k = get(params, "k", 0.0);
        const double hi_default = k > 0.0 ? std::numbers::pi / (2.0 * std::sqrt(k)) : 4.0;
        Interval I{0.0, get(params, "hi", hi_default), true};
        auto sigma = WarpingFunction::scaled_model(1.0, k, I);
        Fiber fiber{fiber_dim, 1.0, FiberKind::round_sphere};
        return finish_entry(name, WarpedManifold(n, sigma, fiber, k), 1e-12, I.lo, I.hi);
    }
    if (name == "scaled_model") {
        const double rho = get(params, "rho", 1.0);
        const double k = get(params, "k", -1.0);
        const double hi_default = k > 0.0 ? std::numbers::pi / (2.0 * std::sqrt(k)) : 3.0;
        Interval I{get(params, "lo", 0.0), get(params, "hi", hi_default), false};
        auto sigma = WarpingFunction::scaled_model(rho, k, I);
        Fiber fiber{fiber_dim, rho, FiberKind::abstract_bound};
        return finish_entry(name, WarpedManifold(n, sigma, fiber, k), 1e-12, I.lo, I.hi);
    }
    if (name == "exponential") {
        const double k = get(params, "k", -1.0);
        if (!(k < 0.0))
            throw construction_error("exponential entry requires k < 0");
        Interval I{get(params, "lo", -1.0), get(params, "hi", 2.0), false};
        auto sigma = WarpingFunction::exponential(1.0, 0.0, k, I);
        Fiber fiber{fiber_dim, 0.0, fiber_dim == 1 ? FiberKind::circle : FiberKind::flat_torus};
        return finish_entry(name, WarpedManifold(n, sigma, fiber, k), 1e-12, I.lo, I.hi);
    }
    if (name == "two_exponential") {
        const double c1 = get(params, "c1", 1.0);
        const double c2 = get(params, "c2", 1.0);
        const double k = get(params, "k", -1.0);
        if (!(k < 0.0))
            throw construction_error("two_exponential entry requires k < 0");
        if (!(c1 >= c2 && c2 > 0.0))
            throw construction_error("two_exponential entry requires c1 >= c2 > 0");
        Interval I{get(params, "lo", 0.0), get(params, "hi", 2.5), false};
        auto sigma = WarpingFunction::exponential(c1, c2, k, I);
        Fiber fiber{fiber_dim, 4.0 * k * c1 * c2, FiberKind::abstract_bound};
        return finish_entry(name, WarpedManifold(n, sigma, fiber, k), 1e-12, I.lo, I.hi);
    }
    if (name == "glued") {
        const double a = get(params, "a", 1.0);
        const double b = get(params, "b", 2.0);
        const double eps = get(params, "eps", 0.1 * (b - a));
        auto sigma = WarpingFunction::glued(a, b, eps);
        // guard against typos in the tail formulas: sigma, sigma', sigma''
        // must join the Euclidean stretch smoothly at r = b
        const double d = std::min(1e-4, 0.25 * eps);
        for (int order = 0; order <= 2; ++order) {
            const double jump =
                sigma.eval(b + d, order) - 2.0 * sigma.eval(b, order) + sigma.eval(b - d, order);
            if (std::abs(jump) > 1e-8)
                throw construction_error("glued entry: sigma discontinuous across r = b");
        }
        Fiber fiber{fiber_dim, 1.0, FiberKind::round_sphere};
        // Ricci tolerance relaxed: the tail is checked by sampling, not algebra.
        return finish_entry(name, WarpedManifold(n, sigma, fiber, 0.0), 1e-9, a, b);
    }
    if (name == "cylinder") {
        Interval I{get(params, "lo", -1.0), get(params, "hi", 1.0), false};
        auto sigma = WarpingFunction::constant(get(params, "c", 1.0), I);
        Fiber fiber{fiber_dim, 0.0, fiber_dim == 1 ? FiberKind::circle : FiberKind::flat_torus};
        return finish_entry(name, WarpedManifold(n, sigma, fiber, 0.0), 1e-12, I.lo, I.hi);
    }
    std::ostringstream os;
    os << "unknown catalog entry '" << name << "'";
    throw construction_error(os.str());
}

bool validate_model_pole(const CatalogEntry& entry, int order_checked) {
    const Interval& dom = entry.manifold.sigma.domain();
    if (!dom.closed_at_lo)
        throw precondition_error("validate_model_pole: entry is not a model manifold");
    const WarpingFunction& s = entry.manifold.sigma;
    const bool tab = s.third_derivative_reduced_accuracy();
    const double tol_low = tab ? 1e-6 : 1e-8;
    if (std::abs(s.eval(0.0, 0)) > tol_low)
        return false;
    if (std::abs(s.eval(0.0, 1) - 1.0) > tol_low)
        return false;
    if (std::abs(s.eval(0.0, 2)) > tol_low)
        return false;
    const double h = std::min(0.05, 0.1 * dom.length());
    if (order_checked >= 4) {
        // one-sided second difference of sigma''
        const double est = (2.0 * s.eval(0.0, 2) - 5.0 * s.eval(h, 2) + 4.0 * s.eval(2 * h, 2) -
                            s.eval(3 * h, 2)) /
                           (h * h);
        if (std::abs(est) > 5e-3)
            return false;
    }
    if (order_checked >= 6) {
        const double est = (3.0 * s.eval(0.0, 2) - 14.0 * s.eval(h, 2) + 26.0 * s.eval(2 * h, 2) -
                            24.0 * s.eval(3 * h, 2) + 11.0 * s.eval(4 * h, 2) - 2.0 * s.eval(5 * h, 2)) /
                           (h * h * h * h);
        if (std::abs(est) > 5e-2)
            return false;
    }
    return true;
}

std::vector<CatalogEntry> default_catalog(int n) {
    const double dn = n;
    std::vector<CatalogEntry> out;
    out.push_back(build_entry("space_form", {{"k", 0.0}, {"n", dn}}));
    out.push_back(build_entry("space_form", {{"k", -1.0}, {"n", dn}}));
    out.push_back(build_entry("space_form", {{"k", 1.0}, {"n", dn}}));
    out.push_back(build_entry("scaled_model", {{"rho", 2.0}, {"k", -1.0}, {"n", dn}}));
    out.push_back(build_entry("scaled_model", {{"rho", 1.5}, {"k", 1.0}, {"n", dn}}));
    out.push_back(build_entry("exponential", {{"k", -1.0}, {"n", dn}}));
    out.push_back(build_entry("two_exponential", {{"c1", 1.0}, {"c2", 1.0}, {"k", -1.0}, {"n", dn}}));
    out.push_back(build_entry("two_exponential", {{"c1", 2.0}, {"c2", 0.5}, {"k", -0.5}, {"n", dn}}));
    out.push_back(build_entry("glued", {{"a", 1.0}, {"b", 2.0}, {"n", dn}}));
    out.push_back(build_entry("cylinder", {{"n", dn}}));
    return out;
}

} // namespace overwarp
