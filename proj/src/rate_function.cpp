#include "iukit/rate_function.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "iukit/errors.hpp"
#include "iukit/numerics.hpp"

namespace iukit {

namespace {

constexpr double kDefaultRCap = 1e15;

// Adaptive Simpson refinement on [a, b] with cached endpoint and midpoint
// values. Depth is capped so integrands with jumps (tabulated rates have
// piecewise-constant inverses) terminate with a bounded error.
template <class F>
double adaptive_panel(const F& g, double a, double m, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth) {
  const double lmx = 0.5 * (a + m);
  const double rmx = 0.5 * (m + b);
  const double flm = g(lmx);
  const double frm = g(rmx);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_panel(g, a, lmx, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_panel(g, m, rmx, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate_window(const F& g, double a, double b, double tol_rel) {
  const double m = 0.5 * (a + b);
  const double fa = g(a);
  const double fm = g(m);
  const double fb = g(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double tol = tol_rel * std::abs(whole) + 1e-300;
  return adaptive_panel(g, a, m, b, fa, fm, fb, whole, tol, 36);
}

}  // namespace

RateFunction RateFunction::from_log(std::function<double(double)> log_eval) {
  if (!log_eval) throw DomainError("RateFunction: empty evaluator");
  return RateFunction(Kind::closed_form, std::move(log_eval));
}

RateFunction RateFunction::from_table(std::vector<double> r, std::vector<double> log_beta) {
  if (r.size() != log_beta.size() || r.empty()) {
    throw DomainError("RateFunction: table sizes must match and be nonempty");
  }
  if (!(r.front() > 0.0)) throw DomainError("RateFunction: radii must be positive");
  std::vector<double> log_r(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i > 0) {
      if (!(r[i] > r[i - 1])) throw DomainError("RateFunction: radii must increase");
      if (log_beta[i] > log_beta[i - 1] + 1e-9 * std::max(1.0, std::abs(log_beta[i - 1]))) {
        throw DomainError("RateFunction: table is not non-increasing");
      }
    }
    log_r[i] = std::log(r[i]);
  }
  auto eval = [lr = std::move(log_r), lb = std::move(log_beta)](double rr) {
    if (!(rr > 0.0)) throw DomainError("RateFunction: radius must be positive");
    const double x = std::log(rr);
    if (x <= lr.front()) return lb.front();
    if (x >= lr.back()) return lb.back();
    const auto it = std::upper_bound(lr.begin(), lr.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - lr.begin()) - 1;
    const double w = (x - lr[i]) / (lr[i + 1] - lr[i]);
    return lb[i] + w * (lb[i + 1] - lb[i]);
  };
  return RateFunction(Kind::tabulated, std::move(eval));
}

double RateFunction::value(double r) const { return exp_saturating(log_eval_(r)); }

double beta_inverse_log(const RateFunction& beta, double log_s, double r_cap) {
  if (std::isnan(log_s)) throw DomainError("beta_inverse: level must not be NaN");
  if (beta.log_value(r_cap) > log_s) return r_cap;
  // Establish a bracket [lo, hi] with beta(lo) > s >= beta(hi) by geometric
  // walks from r = 1, or conclude the infimum is 0.
  double hi;
  double lo;
  if (beta.log_value(std::min(1.0, r_cap)) <= log_s) {
    hi = std::min(1.0, r_cap);
    double step = std::log(2.0);
    for (;;) {
      const double cand = hi * std::exp(-step);
      if (cand < 1e-300) return 0.0;
      if (beta.log_value(cand) > log_s) {
        lo = cand;
        break;
      }
      hi = cand;
      step *= 2.0;
    }
  } else {
    lo = std::min(1.0, r_cap);
    double step = std::log(2.0);
    for (;;) {
      const double cand = std::min(lo * std::exp(step), r_cap);
      if (beta.log_value(cand) <= log_s) {
        hi = cand;
        break;
      }
      lo = cand;
      step *= 2.0;
      if (lo >= r_cap) return r_cap;
    }
  }
  double llo = std::log(lo);
  double lhi = std::log(hi);
  while (lhi - llo > 1e-10) {
    const double mid = std::midpoint(llo, lhi);
    if (beta.log_value(std::exp(mid)) <= log_s) {
      lhi = mid;
    } else {
      llo = mid;
    }
  }
  return std::exp(lhi);
}

double beta_inverse(const RateFunction& beta, double s, double r_cap) {
  if (!(s > 0.0)) throw DomainError("beta_inverse: level must be positive");
  return beta_inverse_log(beta, std::log(s), r_cap);
}

PsiValue psi_from_log(const RateFunction& beta, double log_t) {
  if (std::isnan(log_t)) throw DomainError("psi: level must not be NaN");
  if (beta.log_value(kDefaultRCap) > log_t) {
    throw DomainError("psi: t lies below the essential infimum of beta");
  }
  const auto g = [&beta](double u) { return beta_inverse_log(beta, u, kDefaultRCap); };
  if (g(log_t) == 0.0) return {0.0, false};

  // Integrate the head up to the dyadic anchor directly, then sum windows
  // [a 2^j, a 2^(j+1)] that grow geometrically in u itself. On such windows
  // an integrand decaying like u^(-q) gives sums with ratio 2^(1-q) no
  // matter where the integration starts, so the ratio drives both the
  // divergence test (q <= 1.02 means the tail decays too slowly) and the
  // geometric extrapolation of the remainder. Realized rate envelopes carry
  // subleading u^(-1/2) corrections that depress the measured ratio by
  // about 1.7/sqrt(u), so the horizon has to reach u ~ 1e6 before a
  // boundary-regime ratio reads clear of the threshold.
  constexpr int kWindows = 20;
  const double anchor = std::max(1.0, log_t);
  std::vector<double> sums;
  sums.reserve(kWindows);
  double total = anchor > log_t ? integrate_window(g, log_t, anchor, 1e-9) : 0.0;
  double a = anchor;
  for (int j = 0; j < kWindows; ++j) {
    const double b = anchor * std::exp2(j + 1);
    const double s = integrate_window(g, a, b, 1e-9);
    sums.push_back(s);
    total += s;
    a = b;
    // Stop early only when the window sums are both negligible against the
    // running total and collapsing geometrically; a large head with slowly
    // decaying windows (a divergent harmonic tail, say) must fall through
    // to the ratio test below.
    if (s <= 1e-14 * std::max(total, 1e-300) && j > 0 && s <= 0.5 * sums[j - 1]) {
      return {total, false};
    }
  }
  const double r1 = sums[kWindows - 1] / sums[kWindows - 2];
  const double r2 = sums[kWindows - 2] / sums[kWindows - 3];
  constexpr double kDivergenceRatio = 0.9862;  // 2^(1 - 1.02)
  if (r1 >= kDivergenceRatio && r2 >= kDivergenceRatio) {
    return {total, true};
  }
  double rho = r1 + (r1 - r2);  // Aitken-style refinement of the window ratio
  rho = std::clamp(rho, 0.0, 0.985);
  total += sums.back() * rho / (1.0 - rho);
  return {total, false};
}

PsiValue psi(const RateFunction& beta, double t) {
  if (!(t > 0.0)) throw DomainError("psi: t must be positive");
  return psi_from_log(beta, std::log(t));
}

double psi_inverse_log(const RateFunction& beta, double u) {
  if (!(u >= 0.0)) throw DomainError("psi_inverse: target must be nonnegative");
  const double edge = beta.log_inf();
  const double x0 = edge + 1e-9 * std::max(1.0, std::abs(edge));
  PsiValue v = psi_from_log(beta, x0);
  if (v.diverged) throw DivergentRateError("psi_inverse: psi is infinite for every t");
  if (v.value <= u) return x0;
  double lo = x0;
  double step = std::log(2.0);
  double hi = x0 + step;
  for (int i = 0;; ++i) {
    // Realized rate envelopes put psi_inverse at enormous log levels (the
    // certified bounds are doubly exponential in the envelope constants),
    // so the bracket cap has to sit near the top of double range.
    if (i > 80 || hi > 1e16) {
      throw UnboundedSearchError("psi_inverse: no upper bracket below cap");
    }
    v = psi_from_log(beta, hi);
    if (v.diverged) throw DivergentRateError("psi_inverse: psi is infinite for every t");
    if (v.value <= u) break;
    lo = hi;
    step *= 2.0;
    hi += step;
  }
  while (hi - lo > 1e-10 * std::max(1.0, std::abs(hi))) {
    const double mid = std::midpoint(lo, hi);
    if (psi_from_log(beta, mid).value <= u) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double psi_inverse(const RateFunction& beta, double u) {
  return exp_saturating(psi_inverse_log(beta, u));
}

double IuBound::value() const { return exp_saturating(log_bound); }

IuBound iu_upper_bound(const RateFunction& beta, double eps, double t) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("iu_upper_bound: eps must lie in (0,1)");
  if (!(t > 0.0)) throw DomainError("iu_upper_bound: t must be positive");
  const double log_inf_term = beta.log_inf() - std::log(eps);
  const double log_psi_term = psi_inverse_log(beta, (1.0 - eps) * t);
  return {2.0 * std::max(log_inf_term, log_psi_term)};
}

RateFunction beta_from_curvature_split(const PowerLawProfile& k, const PowerLawProfile& big_k,
                                       const ThetaSplit& split, int dim) {
  if (dim < 2) throw DomainError("beta_from_curvature: dimension must be at least 2");
  if (!(split.prefactor > 0.0) || !(split.inverse_scale > 0.0) || !(split.exponent_scale > 0.0)) {
    throw DomainError("beta_from_curvature: constants must be positive");
  }
  return RateFunction::from_log([k, big_k, split, dim](double r) {
    if (!(r > 0.0)) throw DomainError("rate evaluated at nonpositive radius");
    const double kinv = k.inverse_value(split.inverse_scale / r);
    const double ric = big_k.value(4.0 + 2.0 * kinv);
    return std::log(split.prefactor) - 0.5 * dim * std::log(r) +
           split.exponent_scale * kinv * std::sqrt(ric);
  });
}

RateFunction beta_from_curvature(const PowerLawProfile& k, const PowerLawProfile& big_k,
                                 const BoundConstants& c, int dim) {
  return beta_from_curvature_split(k, big_k, {c.theta, c.theta, c.theta}, dim);
}

RateFunction beta_from_drift(const PowerLawProfile& gamma, const PowerLawProfile& big_k,
                             const BoundConstants& c, double m, int dim) {
  if (dim < 2) throw DomainError("beta_from_drift: dimension must be at least 2");
  if (!(c.theta > 0.0) || !(m > 0.0)) {
    throw DomainError("beta_from_drift: constants must be positive");
  }
  const double pre_exponent = 0.5 * (m + dim + 1.0);
  return RateFunction::from_log([gamma, big_k, theta = c.theta, pre_exponent](double r) {
    if (!(r > 0.0)) throw DomainError("rate evaluated at nonpositive radius");
    const double ginv = gamma.inverse_value(32.0 / r);
    const double ric = big_k.value(2.0 + 2.0 * ginv);
    return std::log(theta) - pre_exponent * std::log(r) + theta * ginv * std::sqrt(ric);
  });
}

RateFunction beta_composed(const RateFunction& beta0,
                           std::function<double(double)> lambda0_inverse,
                           const PowerLawProfile& big_k, const BoundConstants& c,
                           bool literal_statement) {
  if (!lambda0_inverse) throw DomainError("beta_composed: empty spectral inverse");
  if (!(c.big_c > 0.0)) throw DomainError("beta_composed: C must be positive");
  return RateFunction::from_log(
      [beta0, inv = std::move(lambda0_inverse), big_k, big_c = c.big_c,
       literal_statement](double r) {
        if (!(r > 0.0)) throw DomainError("rate evaluated at nonpositive radius");
        const double radius = inv(8.0 / r);
        const double ric = big_k.value(2.0 + 2.0 * radius);
        const double growth = literal_statement ? ric : std::sqrt(ric);
        return std::log(big_c) + beta0.log_value(r / 8.0) + big_c * radius * growth;
      });
}

GrowthCheck check_growth_condition(const PowerLawProfile& increasing_profile,
                                   const PowerLawProfile& big_k, GrowthVariant variant) {
  // The grid sits far out so the additive shift inside K stops biasing the
  // fitted exponent; below ~1e8 the shift still moves the slope by more than
  // the 0.02 classification tolerance.
  const double shift = variant == GrowthVariant::curvature ? 4.0 : 2.0;
  constexpr int kPoints = 25;
  const double lr_lo = std::log(1e8);
  const double lr_hi = std::log(1e14);
  std::vector<double> lx;
  std::vector<double> ly;
  lx.reserve(kPoints);
  ly.reserve(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    const double lr = lr_lo + (lr_hi - lr_lo) * i / (kPoints - 1);
    const double big_r = std::exp(lr);
    const double z = increasing_profile.inverse_value(big_r);
    const double lhs = z * std::sqrt(big_k.value(shift + 2.0 * z));
    if (lhs > 0.0) {
      lx.push_back(lr);
      ly.push_back(std::log(lhs));
    }
  }
  GrowthCheck out;
  if (lx.size() < 2) {
    // The left side vanishes on the whole grid, so any eps certifies it.
    out.verdict = GrowthVerdict::iu_certified;
    out.certifiable = true;
    return out;
  }
  const LineFit fit = fit_line(lx, ly);
  out.eps = fit.slope;
  out.margin = 2.0 * fit.max_abs_residual / (lx.back() - lx.front());
  double log_c = kNegInf;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    log_c = std::max(log_c, ly[i] - fit.slope * lx[i]);
  }
  out.c = std::exp(log_c);
  // 0.02 floors the classification tolerance; it matches the resolution the
  // closed-form exponent arithmetic is validated at.
  const double tol = std::max(out.margin, 0.02);
  if (fit.slope <= 1.0 - tol) {
    out.verdict = GrowthVerdict::iu_certified;
  } else if (fit.slope <= 1.0 + tol) {
    out.verdict = GrowthVerdict::boundary_hypercontractive;
  } else {
    out.verdict = GrowthVerdict::not_certifiable;
  }
  out.certifiable = out.verdict == GrowthVerdict::iu_certified;
  return out;
}

double ground_state_log_lower_bound(const PowerLawProfile& big_k, double big_c, double rho) {
  if (!(big_c > 0.0)) throw DomainError("ground_state_lower_bound: C must be positive");
  if (!(rho >= 0.0)) throw DomainError("ground_state_lower_bound: rho must be nonnegative");
  return -std::log(big_c) - big_c * rho * std::sqrt(big_k.value(2.0 * rho));
}

double ground_state_lower_bound(const PowerLawProfile& big_k, double big_c, double rho) {
  return exp_saturating(ground_state_log_lower_bound(big_k, big_c, rho));
}

double cheeger_lower_bound(const PowerLawProfile& k, int dim, double big_r) {
  if (dim < 2) throw DomainError("cheeger_lower_bound: dimension must be at least 2");
  if (!(big_r >= 0.0)) throw DomainError("cheeger_lower_bound: radius must be nonnegative");
  const double kr = k.value(big_r);
  if (!(kr > 0.0)) return 0.0;
  const double c0 = (dim - 1) * std::tanh(std::min(1.0, std::sqrt(kr)));
  return 0.25 * c0 * c0 * kr;
}

}  // namespace iukit
