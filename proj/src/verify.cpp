#include "iukit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iukit/errors.hpp"
#include "iukit/heat.hpp"
#include "iukit/numerics.hpp"

namespace iukit {

double BumpFunction::value(double r) const {
  const double x = (r - center) / width;
  const double q = 1.0 - x * x;
  if (q <= 0.0) return 0.0;
  const double s = r - center;
  return amplitude * std::exp(-shape * s * s) * q * q;
}

double BumpFunction::derivative(double r) const {
  const double x = (r - center) / width;
  const double q = 1.0 - x * x;
  if (q <= 0.0) return 0.0;
  const double s = r - center;
  return -2.0 * s * amplitude * std::exp(-shape * s * s) * q *
         (shape * q + 2.0 / (width * width));
}

std::vector<BumpFunction> draw_family(const TestFunctionFamily& family, double r_max) {
  if (family.count < 1) throw DomainError("draw_family: count must be positive");
  if (!(r_max > 0.0)) throw DomainError("draw_family: r_max must be positive");
  double lo = family.support_lo;
  double hi = family.support_hi;
  if (!(hi > lo)) {
    lo = 0.05 * r_max;
    hi = 0.9 * r_max;
  }
  if (!(lo > 0.0) || !(hi < r_max)) {
    throw DomainError("draw_family: supports must sit inside (0, r_max)");
  }
  const double span = hi - lo;

  std::vector<BumpFunction> out(family.count);
  DeterministicRng rng(family.seed);
  for (BumpFunction& f : out) {
    // Five draws per member regardless of kind, so families with the same
    // seed differ only in the fields the kind controls.
    const double u_center = rng.next_u01();
    const double u_width = rng.next_u01();
    const double u_shape = rng.next_u01();
    const double u_amp = rng.next_u01();
    const double u_kind = rng.next_u01();

    f.center = lo + (0.1 + 0.8 * u_center) * span;
    const double cap = std::min(f.center - lo, hi - f.center);
    f.width = cap * (0.25 + 0.75 * u_width);
    f.amplitude = 0.5 + 1.5 * u_amp;
    bool polynomial = family.kind == FamilyKind::polynomial_bump;
    if (family.kind == FamilyKind::random_mix) polynomial = u_kind < 0.5;
    f.shape = polynomial ? 0.0 : (0.5 + 7.5 * u_shape) / (f.width * f.width);
  }
  return out;
}

RadialQuadrature make_quadrature(const ModelManifold& m, const Potential& v,
                                 const SpectralModel& s, const EigenSystem& es) {
  const RadialMeasure mu = measure_density(m, v);
  RadialQuadrature q;
  q.spacing = s.grid.spacing();
  q.r_max = s.grid.r_max;
  q.lambda0 = es.lambda0();
  q.r.resize(s.unknowns);
  q.log_w.resize(s.unknowns);
  q.log_phi0 = log_ground_state(s, es);
  // Deep-tail solver components are rounding noise; splice in the rebuilt
  // decaying tail where one is available so the ground weight stays honest
  // on far supports.
  const TailExtension ext = mode_tail_extension(s, es.lambda0(), es.psi0());
  for (int i = 0; i < s.unknowns; ++i) {
    q.r[i] = s.node_radius(i);
    q.log_w[i] = mu.log_w(i + s.first_node);
    if (ext.glue >= 0 && i > ext.glue) {
      q.log_phi0[i] = ext.log_abs[i] - 0.5 * s.log_cell_mass[i];
    }
  }
  return q;
}

namespace {

// Trapezoid integrals of one bump, kept as logs. The endpoint halving is
// immaterial for compact supports but kept for exactness.
struct FunctionIntegrals {
  double lf2 = kNegInf;    // log mu(f^2)
  double le = kNegInf;     // log mu(|f'|^2)
  double lg = kNegInf;     // log mu(phi0 |f|)
  double labs = kNegInf;   // log mu(|f|)
  double lf2p = kNegInf;   // same three against phi0^2 mu
  double lep = kNegInf;
  double labsp = kNegInf;
  bool phi_ok = true;
  int support_nodes = 0;
};

FunctionIntegrals integrate(const RadialQuadrature& q, const BumpFunction& f) {
  FunctionIntegrals out;
  LogAccumulator f2, energy, ground, plain, f2p, energyp, plainp;
  const auto begin = std::lower_bound(q.r.begin(), q.r.end(), f.center - f.width);
  const auto end = std::upper_bound(q.r.begin(), q.r.end(), f.center + f.width);
  const int last = static_cast<int>(q.r.size()) - 1;
  for (auto it = begin; it != end; ++it) {
    const int i = static_cast<int>(it - q.r.begin());
    ++out.support_nodes;
    const double lphi = q.log_phi0[i];
    if (lphi == kNegInf) out.phi_ok = false;
    const double val = f.value(q.r[i]);
    const double du = f.derivative(q.r[i]);
    const double edge = (i == 0 || i == last) ? std::log(0.5) : 0.0;
    const double lw = q.log_w[i] + edge;
    if (val != 0.0) {
      const double lv = std::log(std::abs(val));
      f2.add(lw + 2.0 * lv);
      plain.add(lw + lv);
      if (lphi != kNegInf) {
        ground.add(lw + lphi + lv);
        f2p.add(lw + 2.0 * (lphi + lv));
        plainp.add(lw + 2.0 * lphi + lv);
      }
    }
    if (du != 0.0) {
      const double ld = std::log(std::abs(du));
      energy.add(lw + 2.0 * ld);
      if (lphi != kNegInf) energyp.add(lw + 2.0 * (lphi + ld));
    }
  }
  const double lh = std::log(q.spacing);
  out.lf2 = f2.log_total() + lh;
  out.le = energy.log_total() + lh;
  out.lg = ground.log_total() + lh;
  out.labs = plain.log_total() + lh;
  out.lf2p = f2p.log_total() + lh;
  out.lep = energyp.log_total() + lh;
  out.labsp = plainp.log_total() + lh;
  return out;
}

std::vector<FunctionIntegrals> integrate_family(const RadialQuadrature& q,
                                                const TestFunctionFamily& family) {
  const std::vector<BumpFunction> bumps = draw_family(family, q.r_max);
  std::vector<FunctionIntegrals> table(bumps.size());
  const int count = static_cast<int>(bumps.size());
#ifdef IUKIT_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < count; ++i) {
    table[i] = integrate(q, bumps[i]);
  }
  return table;
}

void check_rs(std::span<const double> rs) {
  if (rs.empty()) throw DomainError("inequality test: no r values given");
  for (double r : rs) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw DomainError("inequality test: r values must be positive and finite");
    }
  }
}

enum class Form { isp, super_poincare, ss };

InequalityReport run_inequality(const RadialQuadrature& q, Form form,
                                const RateFunction* rate, double theta_prime,
                                const TestFunctionFamily& family,
                                std::span<const double> rs) {
  check_rs(rs);
  const std::vector<FunctionIntegrals> table = integrate_family(q, family);

  InequalityReport report;
  switch (form) {
    case Form::isp: report.inequality = "isp"; break;
    case Form::super_poincare: report.inequality = "super_poincare"; break;
    case Form::ss: report.inequality = "ss"; break;
  }
  report.rs.assign(rs.begin(), rs.end());
  report.samples.resize(table.size() * rs.size());
  report.min_log_slack = kPosInf;

  for (std::size_t fi = 0; fi < table.size(); ++fi) {
    const FunctionIntegrals& ints = table[fi];
    if (ints.support_nodes < 32) ++report.under_resolved;
    if (form == Form::ss && !ints.phi_ok) {
      throw DomainError("ss inequality: ground state underflows inside a test support");
    }
    for (std::size_t ri = 0; ri < rs.size(); ++ri) {
      const double r = rs[ri];
      double lhs;
      double rhs;
      if (form == Form::ss) {
        lhs = ints.lf2p;
        rhs = log_add_exp(std::log(r) + ints.lep,
                          theta_prime * (1.0 + 1.0 / r) + 2.0 * ints.labsp);
      } else {
        lhs = ints.lf2;
        const double remainder = form == Form::isp ? ints.lg : ints.labs;
        rhs = log_add_exp(std::log(r) + ints.le,
                          rate->log_value(r) + 2.0 * remainder);
      }
      SlackSample& sample = report.samples[fi * rs.size() + ri];
      sample.function_index = static_cast<int>(fi);
      sample.r = r;
      sample.log_slack = rhs - lhs;
      if (sample.log_slack < report.min_log_slack) {
        report.min_log_slack = sample.log_slack;
      }
      if (sample.log_slack < -1e-10) ++report.violations;
    }
  }
  return report;
}

}  // namespace

InequalityReport test_isp(const RadialQuadrature& q, const RateFunction& beta,
                          const TestFunctionFamily& family, std::span<const double> rs) {
  return run_inequality(q, Form::isp, &beta, 0.0, family, rs);
}

InequalityReport test_super_poincare(const RadialQuadrature& q, const RateFunction& beta0,
                                     const TestFunctionFamily& family,
                                     std::span<const double> rs) {
  return run_inequality(q, Form::super_poincare, &beta0, 0.0, family, rs);
}

InequalityReport test_ss_inequality(const RadialQuadrature& q, double theta_prime,
                                    const TestFunctionFamily& family,
                                    std::span<const double> rs) {
  if (!(theta_prime >= 0.0) || !std::isfinite(theta_prime)) {
    throw DomainError("ss inequality: theta' must be finite and non-negative");
  }
  return run_inequality(q, Form::ss, nullptr, theta_prime, family, rs);
}

std::vector<double> empirical_rate(const RadialQuadrature& q,
                                   const TestFunctionFamily& family,
                                   std::span<const double> rs, RemainderKind kind) {
  check_rs(rs);
  const std::vector<FunctionIntegrals> table = integrate_family(q, family);
  std::vector<double> out(rs.size(), kNegInf);
  for (std::size_t ri = 0; ri < rs.size(); ++ri) {
    const double lr = std::log(rs[ri]);
    for (const FunctionIntegrals& ints : table) {
      if (!(ints.lf2 > lr + ints.le)) continue;
      const double numerator = log_diff_exp(ints.lf2, lr + ints.le);
      const double remainder = kind == RemainderKind::ground_weighted ? ints.lg : ints.labs;
      out[ri] = std::max(out[ri], numerator - 2.0 * remainder);
    }
  }
  return out;
}

std::vector<double> empirical_beta(const RadialQuadrature& q,
                                   const TestFunctionFamily& family,
                                   std::span<const double> rs) {
  return empirical_rate(q, family, rs, RemainderKind::ground_weighted);
}

double fit_ss_theta(const RadialQuadrature& q, const TestFunctionFamily& family,
                    std::span<const double> rs) {
  check_rs(rs);
  const std::vector<FunctionIntegrals> table = integrate_family(q, family);
  double theta = 0.0;
  for (const FunctionIntegrals& ints : table) {
    if (!ints.phi_ok) {
      throw DomainError("ss inequality: ground state underflows inside a test support");
    }
    for (double r : rs) {
      const double lr = std::log(r);
      if (!(ints.lf2p > lr + ints.lep)) continue;
      const double numerator = log_diff_exp(ints.lf2p, lr + ints.lep);
      theta = std::max(theta, (numerator - 2.0 * ints.labsp) / (1.0 + 1.0 / r));
    }
  }
  return theta;
}

double fit_log_scale(std::span<const double> log_target,
                     std::span<const double> log_model) {
  if (log_target.size() != log_model.size() || log_target.empty()) {
    throw DomainError("fit_log_scale: mismatched sample lists");
  }
  double shift = 0.0;
  for (std::size_t i = 0; i < log_target.size(); ++i) {
    if (log_target[i] == kNegInf) continue;
    if (log_model[i] == kNegInf) {
      throw DomainError("fit_log_scale: model vanishes where the target is positive");
    }
    shift = std::max(shift, log_target[i] - log_model[i]);
  }
  return shift;
}

SharpnessReport sharpness_probe(ExampleKind example, double delta, double theta,
                                double t, std::span<const double> ladder, int nodes,
                                double stabilize_ratio, double growth_ratio) {
  if (ladder.size() < 3) throw DomainError("sharpness_probe: need at least 3 rungs");
  for (std::size_t j = 1; j < ladder.size(); ++j) {
    if (!(ladder[j] > ladder[j - 1])) {
      throw DomainError("sharpness_probe: ladder must be strictly increasing");
    }
  }
  if (!(t > 0.0)) throw DomainError("sharpness_probe: time must be positive");
  if (nodes < 64) throw DomainError("sharpness_probe: node count too small");

  SharpnessReport report;
  report.example = example;
  report.delta = delta;
  report.theta = theta;
  report.t = t;
  report.ladder.assign(ladder.begin(), ladder.end());

  for (double rm : ladder) {
    const RadialGrid grid{rm, nodes};
    // The drift model's Bakry-Emery parameter only affects rate envelopes,
    // not the operator, so the probe pins it.
    const BuiltModel b = example == ExampleKind::e1
                             ? build_sectional_example(delta, 3, grid)
                             : build_drift_example(delta, theta, 3.0, 3, grid);
    const SpectralModel s = discretize(b.m, b.v);
    const EigenSystem es = solve_modes(s, s.unknowns);
    const IntrinsicField field = build_intrinsic_field(s, es);
    report.log_s.push_back(intrinsic_sup(field, t).log_sup);
  }
  for (std::size_t j = 1; j < report.log_s.size(); ++j) {
    report.ratios.push_back(exp_saturating(report.log_s[j] - report.log_s[j - 1]));
  }
  const bool grows = std::all_of(report.ratios.begin(), report.ratios.end(),
                                 [&](double x) { return x > growth_ratio; });
  if (report.ratios.back() < stabilize_ratio) {
    report.verdict = SharpnessVerdict::stabilizes;
  } else if (grows) {
    report.verdict = SharpnessVerdict::grows;
  } else {
    report.verdict = SharpnessVerdict::inconclusive;
  }
  return report;
}

GroundFit groundstate_asymptotics(const RadialQuadrature& q, double window_lo,
                                  double window_hi) {
  if (!(window_lo >= 1.0) || !(window_hi > window_lo) ||
      !(window_hi <= 0.6 * q.r_max * (1.0 + 1e-12))) {
    throw DomainError("groundstate_asymptotics: window must sit inside [1, 0.6 r_max]");
  }
  double peak = kNegInf;
  for (double lg : q.log_phi0) peak = std::max(peak, lg);

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < q.r.size(); ++i) {
    if (q.r[i] < window_lo || q.r[i] > window_hi) continue;
    const double drop = peak - q.log_phi0[i];
    if (!(drop > 1e-6) || !std::isfinite(drop)) continue;
    xs.push_back(std::log(q.r[i]));
    ys.push_back(std::log(drop));
  }
  if (xs.size() < 20) {
    throw WindowTooSmallError("groundstate_asymptotics: only " +
                              std::to_string(xs.size()) + " usable nodes");
  }
  const LineFit fit = fit_line(xs, ys);
  return GroundFit{fit.slope, fit.intercept, fit.max_abs_residual};
}

ConstantFit fit_constants(std::span<const std::pair<double, double>> samples,
                          FitModel model) {
  if (samples.size() < 8) throw DomainError("fit_constants: need at least 8 samples");
  std::vector<double> xs, ys;
  xs.reserve(samples.size());
  ys.reserve(samples.size());
  for (const auto& [x, y] : samples) {
    if (!(y > 0.0)) throw DomainError("fit_constants: ordinates must be positive");
    if (model == FitModel::power_law) {
      if (!(x > 0.0)) throw DomainError("fit_constants: power law needs positive x");
      xs.push_back(std::log(x));
    } else {
      xs.push_back(x);
    }
    ys.push_back(std::log(y));
  }
  const LineFit fit = fit_line(xs, ys);
  double lift = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lift = std::max(lift, ys[i] - fit.intercept - fit.slope * xs[i]);
  }
  ConstantFit out;
  out.c1 = std::exp(fit.intercept + lift);
  out.c2 = fit.slope;
  out.max_residual = fit.max_abs_residual;
  return out;
}

}  // namespace iukit
