#include "iukit/power_law.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "iukit/errors.hpp"
#include "iukit/numerics.hpp"

namespace iukit {

double PowerLawProfile::value(double r) const {
  if (exponent == 0.0) return floor_value + coefficient;
  const double ra = std::abs(r);
  const double rs = std::abs(smoothing_radius);
  const double hi = std::max(ra, rs);
  if (hi == 0.0) {
    // Exact power law evaluated at the origin.
    if (exponent > 0.0) return floor_value;
    return floor_value + coefficient * kPosInf;
  }
  const double q = std::min(ra, rs) / hi;
  const double q4 = q * q * q * q;
  const double log_core = exponent * (std::log(hi) + 0.25 * std::log1p(q4));
  return floor_value + coefficient * exp_saturating(log_core);
}

double PowerLawProfile::inverse_value(double y) const {
  if (!std::isfinite(y)) throw DomainError("inverse_value: target must be finite");
  if (exponent < 0.0 && coefficient > 0.0) {
    throw DomainError("inverse_value: profile is decreasing");
  }
  if (y <= value(0.0)) return 0.0;
  if (exponent <= 0.0 || coefficient <= 0.0) {
    throw UnboundedSearchError("inverse_value: constant profile never reaches target");
  }
  // Invert floor + a * (s^4 + rs^4)^(p/4) = y.
  const double core = (y - floor_value) / coefficient;
  const double rs = std::abs(smoothing_radius);
  const double s4 = std::pow(core, 4.0 / exponent) - rs * rs * rs * rs;
  if (s4 <= 0.0) return 0.0;
  return std::pow(s4, 0.25);
}

double inverse_increasing(const PowerLawProfile& h, double y, double search_cap) {
  if (!std::isfinite(y)) throw DomainError("inverse_increasing: target must be finite");
  if (h.exponent < 0.0 && h.coefficient > 0.0) {
    throw DomainError("inverse_increasing: profile is decreasing");
  }
  if (h.value(0.0) >= y) return 0.0;
  if (h.exponent <= 0.0 || h.coefficient <= 0.0) {
    throw UnboundedSearchError("inverse_increasing: constant profile never reaches target");
  }
  double lo = 0.0;
  double hi = std::max(h.smoothing_radius, 1.0);
  while (h.value(hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (hi > search_cap) {
      throw UnboundedSearchError("inverse_increasing: no bracket below cap " +
                                 std::to_string(search_cap));
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-10 * hi; ++i) {
    const double mid = std::midpoint(lo, hi);
    if (h.value(mid) >= y) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace iukit
