#pragma once

// Rotationally symmetric model geometry: metric dr^2 + f(r)^2 dsigma^2 on
// [0, r_max] with f solving f'' = k f, f(0) = 0, f'(0) = 1, an optional radial
// potential V, and the weighted radial measure w = f^(d-1) e^V. The warping
// function grows doubly fast for the curvature profiles of interest, so all
// f-derived quantities are carried as logarithms on a half-step grid.

#include <span>
#include <vector>

#include "iukit/power_law.hpp"

namespace iukit {

struct RadialGrid {
  double r_max = 10.0;
  int n = 1024;  // number of nodes including r = 0 and r = r_max

  double spacing() const { return r_max / (n - 1); }
  double node(int i) const { return r_max * i / (n - 1); }
  // Fine-grid radius j/2 steps from the pole (even j are nodes).
  double fine(int j) const { return r_max * j / (2.0 * (n - 1)); }
};

class Potential;

struct ModelManifold {
  int dim = 2;
  RadialGrid grid;
  PowerLawProfile k;  // radial curvature generator, Sec_rad = -k exactly

  // Samples at fine-grid radii grid.fine(j), j = 0 .. 2(n-1).
  // log_f_fine[0] is -inf; log_fp_fine[0] = 0 since f'(0) = 1.
  std::vector<double> log_f_fine;
  std::vector<double> log_fp_fine;

  int fine_count() const { return static_cast<int>(log_f_fine.size()); }
  double log_f(int i) const { return log_f_fine[2 * i]; }
  double log_f_half(int i) const { return log_f_fine[2 * i + 1]; }
  double log_fp(int i) const { return log_fp_fine[2 * i]; }
  // Logarithmic derivative f'/f.
  double g(int i) const;
  double g_half(int i) const;

  // Linear interpolation on the fine grid with a series branch below the
  // first half step.
  double log_f_at(double r) const;
  double log_fp_at(double r) const;
  double g_at(double r) const;
};

// Integrates the warping equation by classical RK4 on half steps of the grid,
// rescaling the state to keep it representable. Requires a non-decreasing,
// non-negative curvature profile.
ModelManifold solve_warping(const PowerLawProfile& k, const RadialGrid& grid, int dim);

struct SectionalRange {
  double k_rad;  // sectional curvature of planes containing the radial field
  double k_tan;  // sectional curvature of tangential planes
};

// Throws PoleError within half a grid spacing of the pole where the
// tangential curvature formula degenerates numerically.
SectionalRange sectional_range(const ModelManifold& m, double r);
double ricci_radial(const ModelManifold& m, double r);
double ricci_tangential(const ModelManifold& m, double r);

// Radial potential: zero, or theta * r^delta outside inner_radius with an
// even C^2 polynomial core inside that matches value and first two
// derivatives at inner_radius and has zero slope at the pole. delta = 2
// degenerates to theta * r^2 globally.
class Potential {
 public:
  static Potential zero();
  static Potential power(double theta, double delta, double inner_radius);

  double value(double r) const;
  double derivative(double r) const;
  double second_derivative(double r) const;

  bool is_zero() const { return zero_; }
  double theta() const { return theta_; }
  double delta() const { return delta_; }
  double inner_radius() const { return r0_; }

 private:
  bool zero_ = true;
  double theta_ = 0.0;
  double delta_ = 0.0;
  double r0_ = 1.0;
  double a0_ = 0.0;
  double b2_ = 0.0;
  double c4_ = 0.0;
};

// Drift of the generator Delta + grad V in the radial direction:
// (d-1) f'/f + V'. Uses the pole asymptote (d-1)/r below half a spacing.
double radial_drift(const ModelManifold& m, const Potential& v, double r);

struct RadialMeasure {
  RadialGrid grid;
  int dim = 2;
  // log of w = f^(d-1) e^V at fine-grid radii; index 0 is -inf for d >= 2.
  std::vector<double> log_w_fine;
  double log_total_mass = 0.0;

  double log_w(int i) const { return log_w_fine[2 * i]; }
  double log_w_half(int i) const { return log_w_fine[2 * i + 1]; }
  double total_mass() const;
};

// Builds the weighted density and its total mass by per-cell Simpson rule on
// the half-step samples, accumulated in log space.
RadialMeasure measure_density(const ModelManifold& m, const Potential& v);

struct VolumeSample {
  double r = 0.0;
  double log_mu_ball = 0.0;  // lower bound for log mu(B(x,1)) at distance r
  double ratio = 0.0;        // sqrt(K(2+2r)) / log mu(B(x,1))
};

struct VolumeReport {
  std::vector<VolumeSample> samples;
  bool condition_holds = false;
};

// Checks that sqrt(K(2+2r)) / log mu(B(x,1)) trends to zero along the sample
// radii: ratios must be finite, non-increasing, and end at most half the
// initial value. The ball volume is lower-bounded through a tube of radial
// width 1/2 and angular radius 1/(4 f).
VolumeReport check_volume_condition(const ModelManifold& m, const Potential& v,
                                    const PowerLawProfile& big_k,
                                    std::span<const double> sample_radii);

enum class RateRoute { curvature, drift };

// A model together with the measured hypothesis envelopes the rate formulas
// consume. c1 and c2 are the achieved pinching constants relative to the
// smoothed profile shape.
struct BuiltModel {
  ModelManifold m;
  Potential v;
  PowerLawProfile k_hyp;   // lower sectional envelope, Sec <= -k_hyp (curvature route)
  PowerLawProfile big_k;   // Ricci or Bakry-Emery lower envelope, >= -(curvature term)
  PowerLawProfile gamma;   // drift growth envelope (drift route)
  double c1 = 0.0;
  double c2 = 0.0;
  RateRoute route = RateRoute::curvature;
};

// Pinched sectional model: generator k = (r^4 + rs^4)^(delta/4), envelopes
// measured from the realized curvatures at nodes away from the pole.
BuiltModel build_sectional_example(double delta, int dim, const RadialGrid& grid);

// Drift model: Ricci generator of size r^(2(delta-1)) and potential
// theta r^delta, with measured Bakry-Emery envelope (parameter m) and the
// exact drift-growth envelope gamma(s) = delta^2 theta^2 s^(2(delta-1)).
BuiltModel build_drift_example(double delta, double theta, double m, int dim,
                               const RadialGrid& grid);

// Curvature-route model from a user-supplied generator profile and optional
// potential, with envelopes measured the same way as the sectional example.
BuiltModel build_custom_model(const PowerLawProfile& k, const Potential& v, int dim,
                              const RadialGrid& grid);

}  // namespace iukit
