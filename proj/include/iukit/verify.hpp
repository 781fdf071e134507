#pragma once

// Empirical side of the functional inequalities: seeded families of compactly
// supported C^1 bumps, slack reports for the three inequality forms, the
// domain-growth sharpness probe, ground-state decay fits, and certified
// constant fits. Integrals run in log space because the weighted densities
// overflow double on the steeper example models.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iukit/geometry.hpp"
#include "iukit/rate_function.hpp"
#include "iukit/spectral.hpp"

namespace iukit {

enum class FamilyKind { gaussian_bump, polynomial_bump, random_mix };

struct TestFunctionFamily {
  FamilyKind kind = FamilyKind::gaussian_bump;
  std::uint64_t seed = 42;
  int count = 200;
  // Supports are drawn inside [support_lo, support_hi]; a non-positive
  // interval defaults to [0.05, 0.9] * r_max at draw time.
  double support_lo = 0.0;
  double support_hi = 0.0;
};

// A(1 - ((r-c)/w)^2)_+^2 * exp(-shape (r-c)^2): compactly supported in
// [c-w, c+w], continuously differentiable, shape = 0 for the polynomial kind.
struct BumpFunction {
  double center = 0.0;
  double width = 1.0;
  double shape = 0.0;
  double amplitude = 1.0;

  double value(double r) const;
  double derivative(double r) const;
};

std::vector<BumpFunction> draw_family(const TestFunctionFamily& family, double r_max);

// Node radii, log density, and log ground state shared by the inequality
// testers; quadrature is the trapezoid rule over the active nodes.
struct RadialQuadrature {
  double spacing = 0.0;
  double r_max = 0.0;
  double lambda0 = 0.0;
  std::vector<double> r;
  std::vector<double> log_w;
  std::vector<double> log_phi0;
};

RadialQuadrature make_quadrature(const ModelManifold& m, const Potential& v,
                                 const SpectralModel& s, const EigenSystem& es);

struct SlackSample {
  int function_index = 0;
  double r = 0.0;
  // log RHS - log LHS; negative below -1e-10 counts as a violation, which
  // matches the linear rule slack < -1e-10 * RHS to first order.
  double log_slack = 0.0;
};

struct InequalityReport {
  std::string inequality;
  std::vector<double> rs;
  std::vector<SlackSample> samples;  // function-major
  double min_log_slack = 0.0;
  int violations = 0;
  int under_resolved = 0;  // members with fewer than 32 nodes in support
};

// mu(f^2) <= r mu(|grad f|^2) + beta(r) mu(phi0 |f|)^2.
InequalityReport test_isp(const RadialQuadrature& q, const RateFunction& beta,
                          const TestFunctionFamily& family, std::span<const double> rs);

// mu(f^2) <= r mu(|grad f|^2) + beta0(r) mu(|f|)^2.
InequalityReport test_super_poincare(const RadialQuadrature& q, const RateFunction& beta0,
                                     const TestFunctionFamily& family,
                                     std::span<const double> rs);

// mu_phi(f^2) <= r mu_phi(|grad f|^2) + exp[theta'(1 + 1/r)] mu_phi(|f|)^2
// against the ground-state weighted measure mu_phi = phi0^2 mu. Requires the
// ground state to be representable on every support.
InequalityReport test_ss_inequality(const RadialQuadrature& q, double theta_prime,
                                    const TestFunctionFamily& family,
                                    std::span<const double> rs);

enum class RemainderKind { ground_weighted, plain };

// log of the smallest rate making the inequality hold on the family at each
// r: sup over members of (mu(f^2) - r mu(|grad f|^2)) / remainder^2, -inf
// when no member has a positive numerator. Non-increasing in r.
std::vector<double> empirical_rate(const RadialQuadrature& q,
                                   const TestFunctionFamily& family,
                                   std::span<const double> rs, RemainderKind kind);

std::vector<double> empirical_beta(const RadialQuadrature& q,
                                   const TestFunctionFamily& family,
                                   std::span<const double> rs);

// Smallest theta' making the ground-weighted form hold on the family over
// the tested rs; 0 when every numerator is non-positive.
double fit_ss_theta(const RadialQuadrature& q, const TestFunctionFamily& family,
                    std::span<const double> rs);

// Smallest additive log shift making log_model + shift >= log_target
// pointwise; 0 when the model already dominates. -inf targets are ignored.
double fit_log_scale(std::span<const double> log_target,
                     std::span<const double> log_model);

enum class ExampleKind { e1, e2 };
enum class SharpnessVerdict { stabilizes, grows, inconclusive };

struct SharpnessReport {
  ExampleKind example = ExampleKind::e1;
  double delta = 0.0;
  double theta = 0.0;
  double t = 0.0;
  std::vector<double> ladder;      // r_max rungs, strictly increasing
  std::vector<double> log_s;       // log S(t) per rung
  std::vector<double> ratios;      // successive S ratios, saturating
  SharpnessVerdict verdict = SharpnessVerdict::inconclusive;
};

// Recomputes the intrinsic supremum at fixed t over a ladder of domains with
// a fixed node count (fixed spacing-to-radius ratio). Stabilizing S certifies
// nothing by itself but growing S across every rung is the numerical
// signature of a diverging intrinsic ratio.
SharpnessReport sharpness_probe(ExampleKind example, double delta, double theta,
                                double t, std::span<const double> ladder,
                                int nodes = 1024, double stabilize_ratio = 1.05,
                                double growth_ratio = 1.5);

struct GroundFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max absolute fit residual
};

// Least squares of log(-log(phi0/max phi0)) against log r over the window,
// which must sit inside [1, 0.6 r_max]. The slope estimates the decay
// exponent. Throws WindowTooSmallError below 20 usable nodes.
GroundFit groundstate_asymptotics(const RadialQuadrature& q, double window_lo,
                                  double window_hi);

enum class FitModel { log_affine, power_law };

struct ConstantFit {
  double c1 = 0.0;
  double c2 = 0.0;
  double max_residual = 0.0;  // in log ordinates
};

// Least squares in the model's linearizing coordinates, y = c1 exp(c2 x) or
// y = c1 x^c2, with c1 inflated by the largest upward residual so the fitted
// curve dominates every sample.
ConstantFit fit_constants(std::span<const std::pair<double, double>> samples,
                          FitModel model);

}  // namespace iukit
