#include "iukit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "iukit/csv.hpp"
#include "iukit/errors.hpp"
#include "iukit/geometry.hpp"
#include "iukit/heat.hpp"
#include "iukit/numerics.hpp"
#include "iukit/rate_function.hpp"
#include "iukit/spectral.hpp"
#include "iukit/verify.hpp"

namespace iukit {

namespace {

constexpr const char* kVersion = "1.0.0";

struct Emitter {
  std::string dir;
  bool quiet = false;
  RunResult result;
  std::vector<std::string> notes;

  void emit(const std::string& name, const std::string& text) {
    write_text_file(dir + "/" + name, text);
    result.artifacts.push_back(name);
    if (!quiet) std::printf("wrote %s/%s\n", dir.c_str(), name.c_str());
  }

  void flag(const std::string& f) {
    if (std::find(result.flags.begin(), result.flags.end(), f) == result.flags.end()) {
      result.flags.push_back(f);
    }
  }

  void note(std::string line) { notes.push_back(std::move(line)); }
};

BuiltModel make_model(const RunConfig& cfg) {
  const RadialGrid grid{cfg.r_max, cfg.n};
  switch (cfg.example) {
    case ExampleChoice::e1:
      return build_sectional_example(cfg.delta, cfg.dim, grid);
    case ExampleChoice::e2:
      return build_drift_example(cfg.delta, cfg.theta, cfg.m, cfg.dim, grid);
    case ExampleChoice::custom:
      break;
  }
  // The custom example is curvature-only; potentials enter through e2.
  return build_custom_model(cfg.curvature, Potential::zero(), cfg.dim, grid);
}

RateFunction route_rate(const BuiltModel& b, const RunConfig& cfg) {
  if (b.route == RateRoute::drift) {
    return beta_from_drift(b.gamma, b.big_k, cfg.constants, cfg.m, cfg.dim);
  }
  return beta_from_curvature(b.k_hyp, b.big_k, cfg.constants, cfg.dim);
}

const char* route_label(const BuiltModel& b) {
  return b.route == RateRoute::drift ? "drift" : "curvature";
}

void flag_ground_mass(Emitter& em, const SpectralModel& s, const EigenSystem& es) {
  // Mass piling up against the truncation boundary means the grid is
  // standing in for essential spectrum rather than resolving an eigenstate.
  const std::vector<double>& psi0 = es.psi0();
  double tail = 0.0;
  double total = 0.0;
  for (int i = 0; i < s.unknowns; ++i) {
    const double mass = psi0[i] * psi0[i];
    total += mass;
    if (s.node_radius(i) > 0.9 * s.grid.r_max) tail += mass;
  }
  if (tail > 0.5 * total) em.flag("ground_mass_near_boundary");
}

std::string manifold_table(const ModelManifold& m, const Potential& v) {
  const RadialMeasure mu = measure_density(m, v);
  CsvTable t({"r", "f", "f_prime", "V", "log_w"});
  for (int i = 0; i < m.grid.n; ++i) {
    const double r = m.grid.node(i);
    t.cell(r)
        .cell(exp_saturating(m.log_f(i)))
        .cell(exp_saturating(m.log_fp(i)))
        .cell(v.value(r))
        .cell(mu.log_w(i))
        .end_row();
  }
  return t.text();
}

std::string spectrum_table(const SpectralModel& s, const EigenSystem& es, int modes) {
  std::vector<std::string> header{"r"};
  for (int j = 0; j < modes; ++j) {
    header.push_back("phi" + std::to_string(j) + " lambda=" + format_double(es.lambdas[j]));
  }
  CsvTable t(header);
  std::vector<std::vector<double>> phi(modes);
  for (int j = 0; j < modes; ++j) phi[j] = values_from_psi(s, es.psi[j]);
  for (int i = 0; i < s.unknowns; ++i) {
    t.cell(s.node_radius(i));
    for (int j = 0; j < modes; ++j) t.cell(phi[j][i]);
    t.end_row();
  }
  return t.text();
}

std::string slack_table(const InequalityReport& rep) {
  CsvTable t({"function_index", "r", "log_slack"});
  for (const SlackSample& sample : rep.samples) {
    t.cell(sample.function_index).cell(sample.r).cell(sample.log_slack).end_row();
  }
  return t.text();
}

void suite_summary(std::string& out, const InequalityReport& rep, const std::string& rate) {
  out += rep.inequality + ": rate = " + rate + "\n";
  out += "  samples: " + std::to_string(rep.samples.size());
  out += "  violations: " + std::to_string(rep.violations);
  out += "  under_resolved: " + std::to_string(rep.under_resolved) + "\n";
  out += "  min log slack: " + format_double(rep.min_log_slack) + "\n\n";
}

// ---------------------------------------------------------------------------
// spectrum

void run_spectrum(const RunConfig& cfg, Emitter& em) {
  const BuiltModel b = make_model(cfg);
  const SpectralModel s = discretize(b.m, b.v);
  const EigenSystem es = solve_modes(s, 1 + cfg.excited);
  em.emit("manifold.csv", manifold_table(b.m, b.v));
  em.emit("spectrum.csv", spectrum_table(s, es, es.modes()));
  flag_ground_mass(em, s, es);
  em.note("lambda0 = " + format_double(es.lambda0()));
  em.result.message = "exported " + std::to_string(es.modes()) + " modes on " +
                      std::to_string(s.unknowns) + " interior nodes";
}

// ---------------------------------------------------------------------------
// heat

void run_heat(const RunConfig& cfg, Emitter& em) {
  const BuiltModel b = make_model(cfg);
  const SpectralModel s = discretize(b.m, b.v);
  const double t_min = *std::min_element(cfg.times.begin(), cfg.times.end());

  // Mode count follows the recorded truncation bound: double until the modes
  // beyond the computed ones contribute less than 1e-10 of the pole diagonal
  // at the sharpest requested time.
  int count = std::min(64, s.unknowns);
  EigenSystem es = solve_modes(s, count);
  while (es.modes() < s.unknowns) {
    const double tail = log_kernel_truncation(s, es, 0, t_min);
    const double diag = kernel_value(s, es, 0, 0, t_min).log_abs;
    if (tail <= diag + std::log(1e-10)) break;
    count = std::min(2 * count, s.unknowns);
    es = solve_modes(s, count);
  }

  CsvTable table({"t", "r", "h"});
  for (double t : cfg.times) {
    const std::vector<KernelValue> row = kernel_row(s, es, 0, t);
    for (int i = 0; i < s.unknowns; ++i) {
      table.cell(t).cell(s.node_radius(i)).cell(row[i].value()).end_row();
    }
    const double tail = log_kernel_truncation(s, es, 0, t);
    const double diag = kernel_value(s, es, 0, 0, t).log_abs;
    em.note("t = " + format_double(t) + ": relative mode truncation " +
            format_double(std::exp(tail - diag)));
  }
  em.emit("heat.csv", table.text());
  flag_ground_mass(em, s, es);
  em.result.message = "pole-anchored rows at " + std::to_string(cfg.times.size()) +
                      " times with " + std::to_string(es.modes()) + " of " +
                      std::to_string(s.unknowns) + " modes";
}

// ---------------------------------------------------------------------------
// bound

void run_bound(const RunConfig& cfg, Emitter& em) {
  const BuiltModel b = make_model(cfg);
  const GrowthVariant variant =
      b.route == RateRoute::drift ? GrowthVariant::drift : GrowthVariant::curvature;
  const PowerLawProfile& envelope = b.route == RateRoute::drift ? b.gamma : b.k_hyp;

  std::string summary = "bound chain summary\n===================\n";
  summary += std::string("route: ") + route_label(b) + "\n";

  bool growth_ok = false;
  bool growth_boundary = false;
  try {
    const GrowthCheck growth = check_growth_condition(envelope, b.big_k, variant);
    summary += "growth condition: eps = " + format_double(growth.eps) +
               ", c = " + format_double(growth.c) +
               ", margin = " + format_double(growth.margin) + "\n";
    growth_ok = growth.verdict == GrowthVerdict::iu_certified;
    growth_boundary = growth.verdict == GrowthVerdict::boundary_hypercontractive;
  } catch (const NumericError& e) {
    // Flat or bounded envelopes never reach the probe radii; there is no
    // exponent to fit and nothing to certify.
    summary += std::string("growth condition: not evaluable (") + e.what() + ")\n";
  }

  // The drift-route theorem additionally assumes the unit-ball volume
  // condition; the pure curvature route does not consult it.
  if (b.route == RateRoute::drift) {
    std::vector<double> radii;
    for (double f : {0.3, 0.4, 0.5, 0.6, 0.7, 0.8}) radii.push_back(f * cfg.r_max);
    const VolumeReport vol = check_volume_condition(b.m, b.v, b.big_k, radii);
    summary += "volume condition: ";
    summary += vol.condition_holds ? "holds" : "fails";
    summary += " (ratio sqrt(K)/log mu(B) over r =";
    for (const VolumeSample& sample : vol.samples) {
      summary += " " + format_double(sample.r) + ":" + format_double(sample.ratio);
    }
    summary += ")\n";
    if (!vol.condition_holds) {
      em.result.status = RunStatus::violation;
      em.result.message = "volume condition fails; no bound certified";
      summary += "conclusion: " + em.result.message + "\n";
      em.emit("bound_summary.txt", summary);
      return;
    }
  }

  if (growth_boundary) {
    const RateFunction beta = route_rate(b, cfg);
    const PsiValue probe = psi(beta, std::exp(beta.log_inf() + 1.0));
    summary += std::string("psi transform: ") +
               (probe.diverged ? "diverges at every level" : "unexpectedly finite") + "\n";
    em.flag("hypercontractive_regime");
    em.result.message = "hypercontractive regime, no IU bound";
    summary += "conclusion: hypercontractive regime, no IU bound\n";
    em.emit("bound_summary.txt", summary);
    return;
  }
  if (!growth_ok) {
    em.result.status = RunStatus::violation;
    em.result.message = "growth condition fails; no bound certified";
    summary += "conclusion: " + em.result.message + "\n";
    em.emit("bound_summary.txt", summary);
    return;
  }

  const RateFunction beta = route_rate(b, cfg);
  CsvTable table({"t", "psi", "log_iu_bound", "iu_bound"});
  for (double t : cfg.times) {
    const PsiValue p = psi(beta, t);
    if (p.diverged) {
      em.result.status = RunStatus::numeric_error;
      em.result.message = "certified growth but divergent Psi at t = " + format_double(t);
      summary += "conclusion: " + em.result.message + "\n";
      em.emit("bound_summary.txt", summary);
      return;
    }
    const IuBound bound = iu_upper_bound(beta, cfg.constants.epsilon, t);
    table.cell(t).cell(p.value).cell(bound.log_bound).cell(exp_saturating(bound.log_bound)).end_row();
  }
  summary += "conclusion: IU bound certified at " + std::to_string(cfg.times.size()) +
             " times (eps = " + format_double(cfg.constants.epsilon) + ")\n";
  em.emit("bound.csv", table.text());
  em.emit("bound_summary.txt", summary);
  em.result.message = "IU bound certified and tabulated";
}

// ---------------------------------------------------------------------------
// verify

void run_verify(const RunConfig& cfg, Emitter& em) {
  const BuiltModel b = make_model(cfg);
  const SpectralModel s = discretize(b.m, b.v);
  const EigenSystem es = solve_modes(s, 1);
  const RadialQuadrature q = make_quadrature(b.m, b.v, s, es);
  flag_ground_mass(em, s, es);

  TestFunctionFamily test_fam;
  test_fam.seed = cfg.seed;
  test_fam.count = cfg.count;
  TestFunctionFamily fit_fam = test_fam;
  fit_fam.seed = cfg.seed + 1;

  std::string summary = "inequality verification summary\n";
  summary += "===============================\n";
  summary += "test family seed: " + std::to_string(cfg.seed) + "\n";
  summary += "fitting family seed: " + std::to_string(cfg.seed + 1) + "\n";
  summary += "family size: " + std::to_string(cfg.count) + "\n\n";

  int violations = 0;

  try {
    const RateFunction beta = route_rate(b, cfg);
    const InequalityReport rep = test_isp(q, beta, test_fam, cfg.rs);
    em.emit("verify_isp.csv", slack_table(rep));
    suite_summary(summary, rep,
                  std::string(route_label(b)) + " route form, theta = " +
                      format_double(cfg.constants.theta));
    violations += rep.violations;
  } catch (const NumericError& e) {
    summary += std::string("isp: skipped (") + e.what() + ")\n\n";
    em.flag("isp_skipped");
  }

  // The plain-remainder form has no closed theorem rate for every profile,
  // so the tested rate is the empirical one from an independent family,
  // lifted by a fixed log margin. The margin absorbs the sampling spread
  // between two 200-member families; spreads up to 0.46 show up already at
  // modest resolutions.
  constexpr double kSpMargin = 1.0;
  const std::vector<double> emp = empirical_rate(q, fit_fam, cfg.rs, RemainderKind::plain);
  std::vector<double> finite_r;
  std::vector<double> finite_lb;
  for (std::size_t i = 0; i < cfg.rs.size(); ++i) {
    if (std::isfinite(emp[i])) {
      finite_r.push_back(cfg.rs[i]);
      finite_lb.push_back(emp[i] + kSpMargin);
    }
  }
  if (finite_r.size() >= 2) {
    const RateFunction beta0 =
        RateFunction::from_table(std::move(finite_r), std::move(finite_lb));
    const InequalityReport rep = test_super_poincare(q, beta0, test_fam, cfg.rs);
    em.emit("verify_super_poincare.csv", slack_table(rep));
    suite_summary(summary, rep,
                  "tabulated independent-family empirical rate + " +
                      format_double(kSpMargin) + " log margin");
    violations += rep.violations;
  } else {
    summary += "super_poincare: skipped (empirical rate finite at fewer than two radii)\n\n";
    em.flag("super_poincare_skipped");
  }

  // Supports for the ground-weighted form are capped where phi0 is still
  // representable, so the weighted integrals cannot underflow to zero.
  double peak = kNegInf;
  for (double lg : q.log_phi0) peak = std::max(peak, lg);
  double r_star = q.r.back();
  for (std::size_t i = 0; i < q.r.size(); ++i) {
    if (q.log_phi0[i] - peak > -600.0) r_star = q.r[i];
  }
  TestFunctionFamily ss_fam = test_fam;
  ss_fam.support_lo = 0.05 * cfg.r_max;
  ss_fam.support_hi = std::min(0.9 * cfg.r_max, 0.95 * r_star);
  TestFunctionFamily ss_fit = fit_fam;
  ss_fit.support_lo = ss_fam.support_lo;
  ss_fit.support_hi = ss_fam.support_hi;

  try {
    double theta_used = cfg.theta_prime;
    std::string origin = "configured";
    if (!(theta_used > 0.0)) {
      theta_used = 1.05 * fit_ss_theta(q, ss_fit, cfg.rs) + 0.01;
      origin = "fitted on the independent family with a 5% + 0.01 margin";
    }
    const InequalityReport rep = test_ss_inequality(q, theta_used, ss_fam, cfg.rs);
    em.emit("verify_ss.csv", slack_table(rep));
    suite_summary(summary, rep,
                  "theta_prime = " + format_double(theta_used) + " (" + origin + ")");
    violations += rep.violations;
  } catch (const NumericError& e) {
    summary += std::string("ss: skipped (") + e.what() + ")\n\n";
    em.flag("ss_skipped");
  }

  summary += "total violations: " + std::to_string(violations) + "\n";
  summary += "\nresolved configuration\n----------------------\n" + echo_config(cfg);
  em.emit("verify_summary.txt", summary);

  if (violations > 0) {
    em.result.status = RunStatus::violation;
    em.result.message = std::to_string(violations) + " inequality violations";
  } else {
    em.result.message = "all executed suites report zero violations";
  }
}

// ---------------------------------------------------------------------------
// example

void run_example(const RunConfig& cfg, Emitter& em) {
  const BuiltModel b = make_model(cfg);
  const SpectralModel s = discretize(b.m, b.v);
  const EigenSystem es = solve_modes(s, s.unknowns);
  flag_ground_mass(em, s, es);
  em.emit("spectrum.csv", spectrum_table(s, es, std::min(1 + cfg.excited, es.modes())));

  std::optional<RateFunction> beta;
  try {
    const GrowthVariant variant =
        b.route == RateRoute::drift ? GrowthVariant::drift : GrowthVariant::curvature;
    const PowerLawProfile& envelope = b.route == RateRoute::drift ? b.gamma : b.k_hyp;
    const GrowthCheck growth = check_growth_condition(envelope, b.big_k, variant);
    if (growth.verdict == GrowthVerdict::iu_certified) {
      beta = route_rate(b, cfg);
    } else {
      em.note("growth condition not certified (eps = " + format_double(growth.eps) +
              "); S_bound column is infinite");
      em.flag("no_iu_bound");
    }
  } catch (const NumericError& e) {
    em.note(std::string("growth condition not evaluable: ") + e.what());
    em.flag("no_iu_bound");
  }

  const IntrinsicField field = build_intrinsic_field(s, es);
  CsvTable table({"t", "S_empirical", "S_bound", "modes_used", "truncation_bound",
                  "log_S_empirical", "log_S_bound"});
  bool any_guard = false;
  for (double t : cfg.times) {
    const IntrinsicSup sup = intrinsic_sup(field, t);
    any_guard = any_guard || sup.near_guard;
    double log_bound = kPosInf;
    if (beta) {
      try {
        log_bound = iu_upper_bound(*beta, cfg.constants.epsilon, t).log_bound;
      } catch (const NumericError&) {
        em.flag("no_iu_bound");
      }
    }
    // The eigensystem is complete, so the mode sum carries no truncation.
    table.cell(t)
        .cell(exp_saturating(sup.log_sup))
        .cell(exp_saturating(log_bound))
        .cell(field.modes)
        .cell(0.0)
        .cell(sup.log_sup)
        .cell(log_bound)
        .end_row();
  }
  em.emit("intrinsic.csv", table.text());
  if (any_guard) em.flag("intrinsic_argmax_near_guard");

  if (cfg.example == ExampleChoice::custom) {
    em.note("sharpness probe: skipped (parametric examples only)");
    em.flag("sharpness_skipped");
    em.result.message = "intrinsic table written; sharpness probe skipped";
    return;
  }

  const ExampleKind kind =
      cfg.example == ExampleChoice::e1 ? ExampleKind::e1 : ExampleKind::e2;
  const double t_probe = cfg.times.back();
  const SharpnessReport sharp =
      sharpness_probe(kind, cfg.delta, cfg.theta, t_probe, cfg.ladder, cfg.n,
                      cfg.stabilize_ratio, cfg.growth_ratio);

  CsvTable sharp_table({"rung", "r_max", "log_s", "ratio_to_previous"});
  for (std::size_t j = 0; j < sharp.ladder.size(); ++j) {
    sharp_table.cell(static_cast<int>(j)).cell(sharp.ladder[j]).cell(sharp.log_s[j]);
    sharp_table.cell(j == 0 ? std::nan("") : sharp.ratios[j - 1]);
    sharp_table.end_row();
  }
  em.emit("sharpness.csv", sharp_table.text());

  std::string verdict;
  switch (sharp.verdict) {
    case SharpnessVerdict::grows: verdict = "grows"; break;
    case SharpnessVerdict::stabilizes: verdict = "stabilizes"; break;
    case SharpnessVerdict::inconclusive: verdict = "inconclusive"; break;
  }
  std::string report = "domain-growth sharpness report\n";
  report += "==============================\n";
  report += "probe time: " + format_double(t_probe) + "\n";
  report += "nodes per rung: " + std::to_string(cfg.n) + "\n";
  report += "thresholds: stabilize <= " + format_double(cfg.stabilize_ratio) +
            ", grow >= " + format_double(cfg.growth_ratio) + "\n";
  for (std::size_t j = 0; j < sharp.ladder.size(); ++j) {
    report += "r_max = " + format_double(sharp.ladder[j]) +
              ": log S = " + format_double(sharp.log_s[j]);
    if (j > 0) report += " (ratio " + format_double(sharp.ratios[j - 1]) + ")";
    report += "\n";
  }
  report += "verdict: " + verdict + "\n";
  report += "\nresolved configuration\n----------------------\n" + echo_config(cfg);
  em.emit("sharpness.txt", report);
  em.result.message = "intrinsic table written; sharpness verdict: " + verdict;
}

// ---------------------------------------------------------------------------

std::string status_label(RunStatus status) {
  switch (status) {
    case RunStatus::ok: return "ok (exit 0)";
    case RunStatus::usage_error: return "usage error (exit 1)";
    case RunStatus::numeric_error: return "numeric error (exit 2)";
    case RunStatus::violation: return "violation (exit 3)";
  }
  return "unknown";
}

std::string manifest_text(const std::string& name, const RunConfig& cfg,
                          const Emitter& em, double wall_seconds) {
  std::string out = "iukit run manifest\n==================\n";
  out += "subcommand: " + name + "\n";
  out += "status: " + status_label(em.result.status) + "\n";
  out += std::string("version: iukit ") + kVersion + "\n";

  char iso[32];
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(iso, sizeof iso, "%Y-%m-%dT%H:%M:%SZ", &tm);
  char stamp[96];
  std::snprintf(stamp, sizeof stamp, "timestamp: %s wall_seconds=%.3f\n", iso, wall_seconds);
  out += stamp;

  out += "flags: ";
  if (em.result.flags.empty()) {
    out += "none";
  } else {
    for (std::size_t i = 0; i < em.result.flags.size(); ++i) {
      if (i > 0) out += ", ";
      out += em.result.flags[i];
    }
  }
  out += "\n";
  out += "message: " + em.result.message + "\n";
  out += "artifacts:\n";
  if (em.result.artifacts.empty()) out += "  (none)\n";
  for (const std::string& a : em.result.artifacts) out += "  - " + a + "\n";
  if (!em.notes.empty()) {
    out += "\nrun notes\n---------\n";
    for (const std::string& n : em.notes) out += n + "\n";
  }
  out += "\nresolved configuration\n----------------------\n" + echo_config(cfg);
  return out;
}

}  // namespace

RunResult run_subcommand(const std::string& name, const RunConfig& cfg, bool quiet) {
  const auto start = std::chrono::steady_clock::now();
  Emitter em;
  em.dir = cfg.out_dir;
  em.quiet = quiet;

  if (name != "spectrum" && name != "heat" && name != "bound" && name != "verify" &&
      name != "example") {
    em.result.status = RunStatus::usage_error;
    em.result.message = "unknown subcommand '" + name + "'";
    return em.result;
  }

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) {
    em.result.status = RunStatus::usage_error;
    em.result.message = "cannot create output directory '" + cfg.out_dir + "'";
    return em.result;
  }

  try {
    if (name == "spectrum") run_spectrum(cfg, em);
    else if (name == "heat") run_heat(cfg, em);
    else if (name == "bound") run_bound(cfg, em);
    else if (name == "verify") run_verify(cfg, em);
    else run_example(cfg, em);
  } catch (const NumericError& e) {
    em.result.status = RunStatus::numeric_error;
    em.result.message = e.what();
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text_file(cfg.out_dir + "/run_manifest.txt", manifest_text(name, cfg, em, wall));
  em.result.artifacts.push_back("run_manifest.txt");
  if (!quiet) {
    std::printf("%s: %s [%s]\n", name.c_str(), em.result.message.c_str(),
                status_label(em.result.status).c_str());
  }
  return em.result;
}

}  // namespace iukit
