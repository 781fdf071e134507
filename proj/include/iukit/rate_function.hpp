#pragma once

// Rate functions beta(r) entering the functional inequality
//   mu(f^2) <= r * mu(|grad f|^2) + beta(r) * mu(phi0 |f|)^2,
// the transform Psi(t) = integral over s >= t of beta^{-1}(s)/s ds, and the
// heat-kernel bound built from them. Values of beta are doubly exponential in
// the interesting regimes, so everything is carried in log form.

#include <functional>
#include <utility>
#include <vector>

#include "iukit/power_law.hpp"

namespace iukit {

// Non-increasing rate r -> beta(r) on (0, inf), stored as r -> log beta(r).
class RateFunction {
 public:
  enum class Kind { closed_form, tabulated };

  static RateFunction from_log(std::function<double(double)> log_eval);

  // Tabulated rate from samples (r_i, log beta_i) with r strictly increasing.
  // Evaluation interpolates log beta linearly in log r and extrapolates flat
  // on both sides.
  static RateFunction from_table(std::vector<double> r, std::vector<double> log_beta);

  double log_value(double r) const { return log_eval_(r); }
  double value(double r) const;

  // Log of the essential infimum, probed at a large radius (the rate is
  // non-increasing, so the probe value bounds every smaller radius).
  double log_inf(double probe_radius = 1e15) const { return log_eval_(probe_radius); }

  Kind kind() const { return kind_; }

 private:
  RateFunction(Kind kind, std::function<double(double)> log_eval)
      : kind_(kind), log_eval_(std::move(log_eval)) {}

  Kind kind_;
  std::function<double(double)> log_eval_;
};

// Generalized inverse beta^{-1}(s) = inf { r > 0 : beta(r) <= s }, total by
// convention: 0 when beta never exceeds s, r_cap when even beta(r_cap) > s.
// Bisection on log r to 1e-10 relative width.
double beta_inverse(const RateFunction& beta, double s, double r_cap = 1e15);
double beta_inverse_log(const RateFunction& beta, double log_s, double r_cap = 1e15);

struct PsiValue {
  double value = 0.0;
  bool diverged = false;
};

// Psi(t) = integral over s in [t, inf) of beta^{-1}(s)/s ds, evaluated in the
// substitution u = log s. Divergence (integral infinite) is reported through
// the flag, not an exception. Throws DomainError when t is below the
// essential infimum of beta so the integrand is undefined near t.
PsiValue psi(const RateFunction& beta, double t);
PsiValue psi_from_log(const RateFunction& beta, double log_t);

// Smallest tau with Psi(tau) <= u, returned as log tau. Monotone bisection;
// throws DivergentRateError when Psi is identically infinite.
double psi_inverse_log(const RateFunction& beta, double u);
double psi_inverse(const RateFunction& beta, double u);

// Constants entering the explicit bound formulas.
struct BoundConstants {
  double theta = 1.0;
  double big_c = 1.0;
  double c0 = 1.0;
  double epsilon = 0.5;
  double small_c = 1.0;
};

// log of the uniform heat-kernel bound
//   sup e^{lambda0 t} h(x,y,t) / (phi0(x) phi0(y))
//     <= max{ inf beta / eps, Psi^{-1}((1 - eps) t) }^2
// for eps in (0,1). The value itself overflows double for interesting rates,
// so callers get the log and may exponentiate with saturation.
struct IuBound {
  double log_bound = 0.0;
  double value() const;
};
IuBound iu_upper_bound(const RateFunction& beta, double eps, double t);

// Rate from a radial sectional-curvature envelope k (Sec <= -k) and a Ricci
// envelope K (Ric >= -K):
//   beta(r) = pre * r^(-d/2) * exp[ es * kinv(is / r) *
//             sqrt(K(4 + 2 kinv(is / r))) ],  kinv = generalized inverse of k.
// The single-constant form ties pre = is = es = theta.
struct ThetaSplit {
  double prefactor = 1.0;
  double inverse_scale = 1.0;
  double exponent_scale = 1.0;
};
RateFunction beta_from_curvature(const PowerLawProfile& k, const PowerLawProfile& big_k,
                                 const BoundConstants& c, int dim);
RateFunction beta_from_curvature_split(const PowerLawProfile& k, const PowerLawProfile& big_k,
                                       const ThetaSplit& split, int dim);

// Rate from a drift-growth envelope gamma (L rho >= sqrt(gamma(rho))) and a
// Bakry-Emery envelope K:
//   beta(r) = theta * r^(-(m+d+1)/2) * exp[ theta * ginv(32 / r) *
//             sqrt(K(2 + 2 ginv(32 / r))) ],  ginv = generalized inverse of gamma.
RateFunction beta_from_drift(const PowerLawProfile& gamma, const PowerLawProfile& big_k,
                             const BoundConstants& c, double m, int dim);

// Rate composed from a base rate beta0 and an exterior spectral-gap curve
// through its inverse R(y) = smallest R with lambda0(exterior of B_R) >= y:
//   beta(r) = C * beta0(r / 8) * exp[ C * R(8/r) * sqrt(K(2 + 2 R(8/r))) ].
// literal_statement = true reproduces the stated form with K in place of
// sqrt(K); the default follows the derivation.
RateFunction beta_composed(const RateFunction& beta0,
                           std::function<double(double)> lambda0_inverse,
                           const PowerLawProfile& big_k, const BoundConstants& c,
                           bool literal_statement = false);

// Growth condition kinv(R) * sqrt(K(4 + 2 kinv(R))) <= c * R^eps (curvature
// route) or ginv(R) * sqrt(K(2 + 2 ginv(R))) <= c * R^eps (drift route),
// fitted on a log grid R in [1e8, 1e14] where the additive shifts inside the
// envelopes no longer bias the exponent.
enum class GrowthVariant { curvature, drift };
enum class GrowthVerdict { iu_certified, boundary_hypercontractive, not_certifiable };
struct GrowthCheck {
  GrowthVerdict verdict = GrowthVerdict::not_certifiable;
  bool certifiable = false;
  double c = 0.0;       // envelope constant, LHS <= c * R^eps on the grid
  double eps = 0.0;     // fitted exponent
  double margin = 0.0;  // regression residual margin on the exponent
};
GrowthCheck check_growth_condition(const PowerLawProfile& increasing_profile,
                                   const PowerLawProfile& big_k, GrowthVariant variant);

// Ground-state lower bound phi0(x) >= (1/C) exp[-C rho sqrt(K(2 rho))] at
// rho = distance from the reference pole, returned as a value and as a log.
double ground_state_lower_bound(const PowerLawProfile& big_k, double big_c, double rho);
double ground_state_log_lower_bound(const PowerLawProfile& big_k, double big_c, double rho);

// Cheeger-type bound lambda0(exterior of B_{R+1}) >= c0^2 k(R) / 4 with
// c0 = (d - 1) * tanh(min(1, sqrt(k(R)))).
double cheeger_lower_bound(const PowerLawProfile& k, int dim, double big_r);

}  // namespace iukit
