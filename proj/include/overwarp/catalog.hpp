#ifndef OVERWARP_CATALOG_HPP
#define OVERWARP_CATALOG_HPP

#include <map>
#include <string>
#include <vector>

#include "overwarp/geometry.hpp"

namespace overwarp {

enum class Hypothesis {
    sigma_positive,
    sigma_prime_nonneg,
    sigma_prime_not_ident_zero,
    ricci_bound,
    serrin_coefficient_zero,
    model_smooth_at_pole,
    compatibility_trivial,
};

const char* hypothesis_name(Hypothesis h);

/// A named example manifold with its hypotheses re-checked numerically at
/// construction.  `margins` carries the measured witness for each satisfied
/// hypothesis (min sigma, Ricci margin, max |serrin coefficient|, ...).
struct CatalogEntry {
    std::string name;
    WarpedManifold manifold;
    std::map<Hypothesis, double> margins; // satisfied hypotheses only

    bool satisfies(Hypothesis h) const { return margins.count(h) > 0; }
    double margin(Hypothesis h) const;
};

using ParameterMap = std::map<std::string, double>;

/// Builds one of the named examples.  Known names:
///   space_form        (k; model ball chart, round sphere fiber)
///   scaled_model      (rho, k)
///   exponential       (k < 0; flat fiber)
///   two_exponential   (c1 >= c2 > 0, k < 0; fiber rho = 4 k c1 c2)
///   glued             (a, b, eps; Euclidean inside (a,b], smooth tail)
///   cylinder          (sigma = 1; deliberately fails sigma' not-ident-zero)
/// Parameters may override n (default 2) and the interval via lo/hi.
CatalogEntry build_entry(const std::string& name, const ParameterMap& params);

/// sigma(0)=0, sigma'(0)=1, sigma''(0)=0 and vanishing higher even
/// derivatives up to order_checked (finite differences beyond order 2).
bool validate_model_pole(const CatalogEntry& entry, int order_checked);

/// All named entries with default parameters, for `catalog list`.
std::vector<CatalogEntry> default_catalog(int n = 2);

} // namespace overwarp

#endif
