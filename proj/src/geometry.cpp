#include "iukit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "iukit/errors.hpp"
#include "iukit/numerics.hpp"

namespace iukit {

namespace {

void validate_grid(const RadialGrid& grid) {
  if (grid.n < 16) throw DomainError("grid: need at least 16 nodes");
  if (!(grid.r_max > 0.0)) throw DomainError("grid: r_max must be positive");
}

double log_sphere_volume(int m) {
  // Surface measure of the unit sphere S^m.
  return std::log(2.0) + 0.5 * (m + 1) * std::log(M_PI) - std::lgamma(0.5 * (m + 1));
}

}  // namespace

double ModelManifold::g(int i) const {
  if (i == 0) return kPosInf;
  return std::exp(log_fp_fine[2 * i] - log_f_fine[2 * i]);
}

double ModelManifold::g_half(int i) const {
  return std::exp(log_fp_fine[2 * i + 1] - log_f_fine[2 * i + 1]);
}

double ModelManifold::log_f_at(double r) const {
  const double step = grid.r_max / (2.0 * (grid.n - 1));
  if (r <= 0.0) return kNegInf;
  if (r <= step) {
    // Series branch: f = r (1 + k(0) r^2 / 6 + ...).
    return std::log(r) + k.value(0.0) * r * r / 6.0;
  }
  // Interpolate log(f/r), which stays smooth at the pole where log f itself
  // has unbounded curvature.
  const int last = fine_count() - 1;
  int j = static_cast<int>(r / step);
  j = std::clamp(j, 1, last - 1);
  const double w = r / step - j;
  const double a0 = log_f_fine[j] - std::log(grid.fine(j));
  const double a1 = log_f_fine[j + 1] - std::log(grid.fine(j + 1));
  return std::log(r) + a0 + w * (a1 - a0);
}

double ModelManifold::log_fp_at(double r) const {
  const double step = grid.r_max / (2.0 * (grid.n - 1));
  if (r <= 0.0) return 0.0;
  if (r <= step) {
    return std::log1p(0.5 * k.value(0.0) * r * r);
  }
  const int last = fine_count() - 1;
  int j = static_cast<int>(r / step);
  j = std::clamp(j, 1, last - 1);
  const double w = r / step - j;
  return log_fp_fine[j] + w * (log_fp_fine[j + 1] - log_fp_fine[j]);
}

double ModelManifold::g_at(double r) const {
  if (!(r > 0.0)) throw PoleError("g_at: radius must be positive");
  return std::exp(log_fp_at(r) - log_f_at(r));
}

ModelManifold solve_warping(const PowerLawProfile& k, const RadialGrid& grid, int dim) {
  validate_grid(grid);
  if (dim < 2) throw DomainError("solve_warping: dimension must be at least 2");
  if (k.coefficient < 0.0 || k.floor_value < 0.0 || k.exponent < 0.0) {
    throw DomainError("solve_warping: curvature profile must be non-negative and non-decreasing");
  }

  ModelManifold m;
  m.dim = dim;
  m.grid = grid;
  m.k = k;
  const int fine_n = 2 * (grid.n - 1) + 1;
  m.log_f_fine.assign(fine_n, 0.0);
  m.log_fp_fine.assign(fine_n, 0.0);
  m.log_f_fine[0] = kNegInf;
  m.log_fp_fine[0] = 0.0;

  // Rescaled state: f = fs * exp(sc), f' = ps * exp(sc). The pair stays in
  // range by renormalizing whenever it grows past 1e100.
  double fs = 0.0;
  double ps = 1.0;
  double sc = 0.0;
  for (int j = 1; j < fine_n; ++j) {
    const double a = grid.fine(j - 1);
    const double b = grid.fine(j);
    const double h = b - a;
    const double ka = k.value(a);
    const double km = k.value(0.5 * (a + b));
    const double kb = k.value(b);

    const double f1 = ps;
    const double p1 = ka * fs;
    const double f2 = ps + 0.5 * h * p1;
    const double p2 = km * (fs + 0.5 * h * f1);
    const double f3 = ps + 0.5 * h * p2;
    const double p3 = km * (fs + 0.5 * h * f2);
    const double f4 = ps + h * p3;
    const double p4 = kb * (fs + h * f3);

    fs += h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
    ps += h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
    const double mag = std::max(fs, ps);
    if (mag > 1e100) {
      fs /= mag;
      ps /= mag;
      sc += std::log(mag);
    }
    m.log_f_fine[j] = sc + std::log(fs);
    m.log_fp_fine[j] = sc + std::log(ps);
  }
  return m;
}

SectionalRange sectional_range(const ModelManifold& m, double r) {
  if (!(r >= 0.5 * m.grid.spacing())) {
    throw PoleError("sectional_range: radius too close to the pole");
  }
  if (!(r <= m.grid.r_max)) throw DomainError("sectional_range: radius beyond r_max");
  const double lf = m.log_f_at(r);
  const double lfp = m.log_fp_at(r);
  // (1 - f'^2) / f^2 split as 1/f^2 - (f'/f)^2; both pieces stay in range
  // even when f' alone would overflow.
  const double k_tan = exp_saturating(-2.0 * lf) - exp_saturating(2.0 * (lfp - lf));
  return {-m.k.value(r), k_tan};
}

double ricci_radial(const ModelManifold& m, double r) {
  if (!(r >= 0.0 && r <= m.grid.r_max)) throw DomainError("ricci_radial: radius out of range");
  return -(m.dim - 1) * m.k.value(r);
}

double ricci_tangential(const ModelManifold& m, double r) {
  const SectionalRange s = sectional_range(m, r);
  return -m.k.value(r) + (m.dim - 2) * s.k_tan;
}

Potential Potential::zero() { return Potential{}; }

Potential Potential::power(double theta, double delta, double inner_radius) {
  if (!(theta >= 0.0)) throw DomainError("potential: theta must be non-negative");
  if (theta == 0.0) return zero();
  if (!(delta > 0.0)) throw DomainError("potential: delta must be positive");
  if (!(inner_radius > 0.0)) throw DomainError("potential: inner radius must be positive");
  Potential v;
  v.zero_ = false;
  v.theta_ = theta;
  v.delta_ = delta;
  v.r0_ = inner_radius;
  // Even quartic core a + b x^2 + c x^4 matching value, slope and curvature
  // of x^delta at x = 1.
  v.c4_ = delta * (delta - 2.0) / 8.0;
  v.b2_ = 0.5 * delta - delta * (delta - 2.0) / 4.0;
  v.a0_ = 1.0 - v.b2_ - v.c4_;
  return v;
}

double Potential::value(double r) const {
  if (zero_) return 0.0;
  const double ra = std::abs(r);
  if (ra >= r0_) return theta_ * std::pow(ra, delta_);
  const double x = ra / r0_;
  const double x2 = x * x;
  return theta_ * std::pow(r0_, delta_) * (a0_ + x2 * (b2_ + c4_ * x2));
}

double Potential::derivative(double r) const {
  if (zero_) return 0.0;
  const double ra = std::abs(r);
  if (ra >= r0_) return theta_ * delta_ * std::pow(ra, delta_ - 1.0);
  const double x = ra / r0_;
  return theta_ * std::pow(r0_, delta_ - 1.0) * (2.0 * b2_ * x + 4.0 * c4_ * x * x * x);
}

double Potential::second_derivative(double r) const {
  if (zero_) return 0.0;
  const double ra = std::abs(r);
  if (ra >= r0_) return theta_ * delta_ * (delta_ - 1.0) * std::pow(ra, delta_ - 2.0);
  const double x = ra / r0_;
  return theta_ * std::pow(r0_, delta_ - 2.0) * (2.0 * b2_ + 12.0 * c4_ * x * x);
}

double radial_drift(const ModelManifold& m, const Potential& v, double r) {
  if (!(r > 0.0)) throw PoleError("radial_drift: radius must be positive");
  if (r < 0.5 * m.grid.spacing()) {
    return (m.dim - 1) / r + v.derivative(r);
  }
  return (m.dim - 1) * m.g_at(r) + v.derivative(r);
}

double RadialMeasure::total_mass() const { return exp_saturating(log_total_mass); }

RadialMeasure measure_density(const ModelManifold& m, const Potential& v) {
  RadialMeasure mu;
  mu.grid = m.grid;
  mu.dim = m.dim;
  const int fine_n = m.fine_count();
  mu.log_w_fine.assign(fine_n, kNegInf);
  for (int j = 0; j < fine_n; ++j) {
    const double lf = m.log_f_fine[j];
    if (lf == kNegInf) continue;
    mu.log_w_fine[j] = (m.dim - 1) * lf + v.value(m.grid.fine(j));
  }
  // Per-cell Simpson on [node_i, node_{i+1}] with the half-step sample.
  const double h = m.grid.spacing();
  LogAccumulator acc;
  for (int i = 0; i + 1 < m.grid.n; ++i) {
    const double la = mu.log_w_fine[2 * i];
    const double lm = mu.log_w_fine[2 * i + 1];
    const double lb = mu.log_w_fine[2 * i + 2];
    const double panel = log_add_exp(log_add_exp(la, std::log(4.0) + lm), lb);
    acc.add(std::log(h / 6.0) + panel);
  }
  mu.log_total_mass = acc.log_total();
  return mu;
}

VolumeReport check_volume_condition(const ModelManifold& m, const Potential& v,
                                    const PowerLawProfile& big_k,
                                    std::span<const double> sample_radii) {
  const RadialMeasure mu = measure_density(m, v);
  const double step = m.grid.r_max / (2.0 * (m.grid.n - 1));
  VolumeReport report;
  for (double r : sample_radii) {
    if (!(r >= 1.0 && r <= m.grid.r_max)) {
      throw DomainError("volume condition: sample radii must lie in [1, r_max]");
    }
    // Tube of radial extent [r - 3/4, r - 1/4]: every point of it is within
    // distance 1 of the sphere at radius r once the angular radius is capped
    // by 1/(4 f). Partial end segments are dropped, keeping a lower bound.
    const int j_lo = static_cast<int>(std::ceil((r - 0.75) / step));
    const int j_hi = static_cast<int>(std::floor((r - 0.25) / step));
    LogAccumulator tube;
    for (int j = j_lo; j < j_hi; ++j) {
      tube.add(std::log(0.5 * step) +
               log_add_exp(mu.log_w_fine[j], mu.log_w_fine[j + 1]));
    }
    const double log_tube = tube.log_total();
    const double log_alpha = std::min(-std::log(4.0) - m.log_f_at(r - 0.25),
                                      std::log(0.5 * M_PI));
    const double log_cap = log_sphere_volume(m.dim - 2) - std::log(m.dim - 1.0) +
                           (m.dim - 2) * std::log(2.0 / M_PI) +
                           (m.dim - 1) * log_alpha;
    VolumeSample s;
    s.r = r;
    s.log_mu_ball = log_tube + log_cap;
    const double num = std::sqrt(big_k.value(2.0 + 2.0 * r));
    if (num == 0.0) {
      s.ratio = 0.0;
    } else if (!(s.log_mu_ball > 0.0)) {
      s.ratio = kPosInf;
    } else {
      s.ratio = num / s.log_mu_ball;
    }
    report.samples.push_back(s);
  }
  bool holds = !report.samples.empty();
  for (std::size_t i = 0; i + 1 < report.samples.size(); ++i) {
    if (!(report.samples[i + 1].ratio <=
          report.samples[i].ratio * (1.0 + 1e-9) + 1e-300)) {
      holds = false;
    }
  }
  if (holds && !report.samples.empty()) {
    const double first = report.samples.front().ratio;
    const double last = report.samples.back().ratio;
    if (std::isinf(first) || std::isinf(last)) {
      holds = false;
    } else if (!(last <= 0.5 * first + 1e-300)) {
      holds = false;
    }
  }
  report.condition_holds = holds;
  return report;
}

namespace {

// Measured envelopes of the realized sectional curvatures relative to the
// generator's own smoothed shape, over nodes away from the pole.
void measure_sectional_envelopes(const ModelManifold& m, BuiltModel* out) {
  const double h = m.grid.spacing();
  const double r_lo = std::max(4.0 * h, 0.05);
  double lo_ratio = 1.0;
  double hi_ratio = 1.0;
  for (int i = 1; i < m.grid.n; ++i) {
    const double r = m.grid.node(i);
    if (r < r_lo) continue;
    const double shape = m.k.value(r);
    if (!(shape > 0.0)) continue;
    const SectionalRange sec = sectional_range(m, r);
    const double ratio_tan = -sec.k_tan / shape;
    lo_ratio = std::min(lo_ratio, ratio_tan);
    hi_ratio = std::max(hi_ratio, ratio_tan);
  }
  out->c2 = lo_ratio;
  out->c1 = hi_ratio;
  out->k_hyp = m.k;
  out->k_hyp.coefficient *= lo_ratio;
  out->k_hyp.floor_value *= lo_ratio;
  out->big_k = m.k;
  out->big_k.coefficient *= (m.dim - 1) * hi_ratio;
  out->big_k.floor_value *= (m.dim - 1) * hi_ratio;
}

}  // namespace

BuiltModel build_sectional_example(double delta, int dim, const RadialGrid& grid) {
  if (!(delta > 0.0)) throw DomainError("sectional example: delta must be positive");
  PowerLawProfile k{1.0, delta, 0.5, 0.0};
  BuiltModel out;
  out.m = solve_warping(k, grid, dim);
  out.v = Potential::zero();
  out.route = RateRoute::curvature;
  out.gamma = PowerLawProfile{0.0, 0.0, 0.0, 0.0};
  measure_sectional_envelopes(out.m, &out);
  return out;
}

BuiltModel build_custom_model(const PowerLawProfile& k, const Potential& v, int dim,
                              const RadialGrid& grid) {
  BuiltModel out;
  out.m = solve_warping(k, grid, dim);
  out.v = v;
  out.route = RateRoute::curvature;
  out.gamma = PowerLawProfile{0.0, 0.0, 0.0, 0.0};
  measure_sectional_envelopes(out.m, &out);
  return out;
}

BuiltModel build_drift_example(double delta, double theta, double m_param, int dim,
                               const RadialGrid& grid) {
  if (!(delta > 1.0)) throw DomainError("drift example: delta must exceed 1");
  if (!(theta > 0.0)) throw DomainError("drift example: theta must be positive");
  if (!(m_param > 0.0)) throw DomainError("drift example: m must be positive");
  const double q = 2.0 * (delta - 1.0);
  PowerLawProfile k_ric{1.0 / (dim - 1), q, 0.5, 0.0};
  BuiltModel out;
  out.m = solve_warping(k_ric, grid, dim);
  out.v = Potential::power(theta, delta, 1.0);
  out.route = RateRoute::drift;
  out.k_hyp = k_ric;

  // Bakry-Emery envelope: Ric - Hess V - dV (x) dV / m >= -c1 (1 + r^q),
  // with c1 measured against the smoothed shape.
  const PowerLawProfile shape{1.0, q, 0.5, 1.0};
  const double h = grid.spacing();
  const double r_lo = std::max(4.0 * h, 0.05);
  double c1 = 0.0;
  double gamma_ratio = kPosInf;
  const double drift_scale = delta * theta;
  for (int i = 1; i < grid.n; ++i) {
    const double r = grid.node(i);
    if (r < r_lo) continue;
    const double vp = out.v.derivative(r);
    const double vpp = out.v.second_derivative(r);
    const double be_rad = ricci_radial(out.m, r) - vpp - vp * vp / m_param;
    const double be_tan = ricci_tangential(out.m, r) - out.m.g_at(r) * vp;
    const double deficit = std::max({0.0, -be_rad, -be_tan});
    c1 = std::max(c1, deficit / shape.value(r));
    // Achieved drift against the nominal growth delta theta r^(delta-1).
    const double nominal = drift_scale * std::pow(r, delta - 1.0);
    gamma_ratio = std::min(gamma_ratio, radial_drift(out.m, out.v, r) / nominal);
  }
  out.c1 = c1;
  out.c2 = 0.0;
  out.big_k = PowerLawProfile{c1, q, 0.5, c1};
  const double cg = std::min(1.0, gamma_ratio);
  out.gamma = PowerLawProfile{cg * cg * drift_scale * drift_scale, q, 0.0, 0.0};
  return out;
}

}  // namespace iukit
