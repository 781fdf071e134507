#pragma once

// Monotone power-law profiles with a smooth shoulder at the origin. These are
// the hypothesis data (curvature growth, drift growth, Ricci envelopes) every
// rate-function formula consumes.

namespace iukit {

// value(r) = floor_value + coefficient * (r^4 + smoothing_radius^4)^(exponent/4).
//
// The quartic blend is even and C^infinity in r^2, equals
// floor_value + coefficient * smoothing_radius^exponent at r = 0, and stays
// within 1% of the pure power floor_value + coefficient * r^exponent for
// r >= 10 * smoothing_radius (the deviation there is about 2.5e-5 * exponent).
// smoothing_radius = 0 gives the exact power law.
struct PowerLawProfile {
  double coefficient = 1.0;
  double exponent = 0.0;
  double smoothing_radius = 0.5;
  double floor_value = 0.0;

  double value(double r) const;

  // Smallest s >= 0 with value(s) >= y, computed in closed form.
  // Throws UnboundedSearchError when the profile can never reach y and
  // DomainError when y is not finite.
  double inverse_value(double y) const;
};

// Smallest s >= 0 with h(s) >= y for a non-decreasing profile, by bracketing
// and bisection to 1e-10 relative width. Kept alongside the closed form as an
// independently testable path; the two agree to the bisection tolerance.
// Throws UnboundedSearchError when no bracket exists below search_cap and
// DomainError when the profile is decreasing or y is not finite.
double inverse_increasing(const PowerLawProfile& h, double y, double search_cap = 1e12);

}  // namespace iukit
