#include "iukit/heat.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "iukit/errors.hpp"
#include "iukit/numerics.hpp"

namespace iukit {

namespace {

void check_index(const SpectralModel& s, int idx, const char* what) {
  if (idx < 0 || idx >= s.unknowns) {
    throw OutOfRangeError(std::string(what) + ": node index out of range");
  }
}

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError("heat evolution needs a positive finite time");
  }
}

std::vector<double> flatten_psi(const EigenSystem& es) {
  const int modes = es.modes();
  const int nodes = static_cast<int>(es.psi0().size());
  std::vector<double> flat(static_cast<std::size_t>(modes) * nodes);
  for (int j = 0; j < modes; ++j) {
    std::copy(es.psi[j].begin(), es.psi[j].end(),
              flat.begin() + static_cast<std::size_t>(j) * nodes);
  }
  return flat;
}

}  // namespace

double KernelValue::value() const {
  if (sign == 0) return 0.0;
  return sign * exp_saturating(log_abs);
}

KernelValue kernel_value(const SpectralModel& s, const EigenSystem& es, int ia,
                         int ib, double t) {
  check_index(s, ia, "kernel_value");
  check_index(s, ib, "kernel_value");
  check_time(t);
  SignedLogAccumulator acc;
  for (int j = 0; j < es.modes(); ++j) {
    const double pa = es.psi[j][ia];
    const double pb = es.psi[j][ib];
    const double prod = pa * pb;
    if (prod == 0.0) continue;
    acc.add(-es.lambdas[j] * t + std::log(std::abs(pa)) + std::log(std::abs(pb)),
            prod > 0.0 ? +1 : -1);
  }
  const auto [log_abs, sign] = acc.log_abs_total();
  const double mass_shift = 0.5 * (s.log_cell_mass[ia] + s.log_cell_mass[ib]);
  return {log_abs - mass_shift, sign};
}

std::vector<KernelValue> kernel_row(const SpectralModel& s, const EigenSystem& es,
                                    int ia, double t) {
  check_index(s, ia, "kernel_row");
  check_time(t);
  const std::vector<double> flat = flatten_psi(es);
  const std::vector<SignedLog> row =
      kernel_row_parallel(es.lambdas, flat, s.unknowns, ia, t);
  std::vector<KernelValue> out(s.unknowns);
  for (int i = 0; i < s.unknowns; ++i) {
    const double mass_shift = 0.5 * (s.log_cell_mass[ia] + s.log_cell_mass[i]);
    out[i] = {row[i].log_abs - mass_shift, row[i].sign};
  }
  return out;
}

double log_kernel_truncation(const SpectralModel& s, const EigenSystem& es,
                             int ia, double t) {
  check_index(s, ia, "log_kernel_truncation");
  check_time(t);
  if (es.modes() >= s.unknowns) return kNegInf;
  // The omitted modes are orthonormal completions, so their squared values
  // at one node sum to at most 1 - sum of the included squares, and each
  // carries a factor no larger than exp(-lambda_last t).
  double included = 0.0;
  for (int j = 0; j < es.modes(); ++j) {
    included += es.psi[j][ia] * es.psi[j][ia];
  }
  const double rest = std::max(0.0, 1.0 - included);
  if (rest == 0.0) return kNegInf;
  return -es.lambdas.back() * t + std::log(rest) - s.log_cell_mass[ia];
}

std::vector<double> psi_point_mass(const SpectralModel& s, int idx) {
  check_index(s, idx, "psi_point_mass");
  std::vector<double> psi(s.unknowns, 0.0);
  psi[idx] = std::exp(-0.5 * s.log_cell_mass[idx]);
  if (!std::isfinite(psi[idx])) {
    throw NumericError("psi_point_mass: cell mass out of double range");
  }
  return psi;
}

std::vector<double> psi_from_values(const SpectralModel& s,
                                    const std::vector<double>& u) {
  if (static_cast<int>(u.size()) != s.unknowns) {
    throw DomainError("psi_from_values: size mismatch");
  }
  std::vector<double> psi(s.unknowns);
  for (int i = 0; i < s.unknowns; ++i) {
    psi[i] = u[i] * std::exp(0.5 * s.log_cell_mass[i]);
  }
  return psi;
}

std::vector<double> values_from_psi(const SpectralModel& s,
                                    const std::vector<double>& psi) {
  if (static_cast<int>(psi.size()) != s.unknowns) {
    throw DomainError("values_from_psi: size mismatch");
  }
  std::vector<double> u(s.unknowns);
  for (int i = 0; i < s.unknowns; ++i) {
    u[i] = psi[i] * std::exp(-0.5 * s.log_cell_mass[i]);
  }
  return u;
}

std::vector<double> evolve_cn(const SpectralModel& s, std::vector<double> psi,
                              double t, int steps) {
  if (static_cast<int>(psi.size()) != s.unknowns) {
    throw DomainError("evolve_cn: size mismatch");
  }
  check_time(t);
  if (steps < 1) throw DomainError("evolve_cn: need at least one step");
  const double dt = t / steps;
  const int n = s.unknowns;

  // LDL' factorization of I + dt/2 A, done once; the matrix is positive
  // definite since the operator is.
  std::vector<double> d(n), l(n - 1);
  for (int i = 0; i < n; ++i) d[i] = 1.0 + 0.5 * dt * s.diag[i];
  for (int i = 0; i + 1 < n; ++i) l[i] = 0.5 * dt * s.off[i];
  std::vector<double> piv(n), low(n - 1);
  piv[0] = d[0];
  for (int i = 0; i + 1 < n; ++i) {
    if (!(piv[i] > 0.0)) {
      throw NumericError("evolve_cn: implicit matrix lost positivity");
    }
    low[i] = l[i] / piv[i];
    piv[i + 1] = d[i + 1] - low[i] * l[i];
  }
  if (!(piv[n - 1] > 0.0)) {
    throw NumericError("evolve_cn: implicit matrix lost positivity");
  }

  std::vector<double> rhs(n);
  for (int step = 0; step < steps; ++step) {
    for (int i = 0; i < n; ++i) {
      double v = (1.0 - 0.5 * dt * s.diag[i]) * psi[i];
      if (i > 0) v -= 0.5 * dt * s.off[i - 1] * psi[i - 1];
      if (i + 1 < n) v -= 0.5 * dt * s.off[i] * psi[i + 1];
      rhs[i] = v;
    }
    for (int i = 1; i < n; ++i) rhs[i] -= low[i - 1] * rhs[i - 1];
    psi[n - 1] = rhs[n - 1] / piv[n - 1];
    for (int i = n - 2; i >= 0; --i) {
      psi[i] = rhs[i] / piv[i] - low[i] * psi[i + 1];
    }
  }
  return psi;
}

std::vector<double> evolve_spectral(const SpectralModel& s, const EigenSystem& es,
                                    const std::vector<double>& psi, double t) {
  if (static_cast<int>(psi.size()) != s.unknowns) {
    throw DomainError("evolve_spectral: size mismatch");
  }
  check_time(t);
  std::vector<double> out(s.unknowns, 0.0);
  for (int j = 0; j < es.modes(); ++j) {
    double c = 0.0;
    for (int i = 0; i < s.unknowns; ++i) c += es.psi[j][i] * psi[i];
    const double damped = c * std::exp(-es.lambdas[j] * t);
    for (int i = 0; i < s.unknowns; ++i) out[i] += damped * es.psi[j][i];
  }
  return out;
}

IntrinsicField build_intrinsic_field(const SpectralModel& s, const EigenSystem& es) {
  if (es.modes() < s.unknowns) {
    throw InsufficientModesError(
        "intrinsic field needs the complete eigensystem: have " +
        std::to_string(es.modes()) + " of " + std::to_string(s.unknowns));
  }
  IntrinsicField f;
  f.nodes = s.unknowns;
  f.modes = es.modes();
  f.lambda0 = es.lambda0();
  f.gaps.resize(f.modes);
  for (int j = 0; j < f.modes; ++j) f.gaps[j] = es.lambdas[j] - es.lambdas[0];
  f.log_abs_psi.resize(static_cast<std::size_t>(f.nodes) * f.modes);
  // Solver components sit on an absolute rounding-noise floor, so deep-tail
  // entries are meaningless as stored. Each mode gets its decaying tail
  // rebuilt by the backward recurrence where that is valid; where it is not,
  // everything beyond the outermost comfortably-clean component is dropped
  // rather than kept as noise. Dropping only ever lowers the diagonal sums.
  constexpr double kTrust = 1e-8;
  for (int j = 0; j < f.modes; ++j) {
    const std::vector<double>& psi = es.psi[j];
    const TailExtension ext = mode_tail_extension(s, es.lambdas[j], psi);
    int cut = f.nodes - 1;
    while (cut >= 0 && std::abs(psi[cut]) < kTrust) --cut;
    for (int i = 0; i < f.nodes; ++i) {
      double value;
      if (ext.glue >= 0 && i > ext.glue) {
        value = ext.log_abs[i];
      } else if (i > cut) {
        value = kNegInf;
      } else {
        const double a = std::abs(psi[i]);
        value = a > 0.0 ? std::log(a) : kNegInf;
      }
      f.log_abs_psi[static_cast<std::size_t>(i) * f.modes + j] = value;
    }
  }
  f.lg0.resize(f.nodes);
  f.lg0_peak = kNegInf;
  for (int i = 0; i < f.nodes; ++i) {
    f.lg0[i] = f.log_abs_psi[static_cast<std::size_t>(i) * f.modes];
    f.lg0_peak = std::max(f.lg0_peak, f.lg0[i]);
  }
  return f;
}

IntrinsicSup intrinsic_sup(const IntrinsicField& f, double t, double guard) {
  check_time(t);
  if (!(guard > 0.0 && guard < 1.0)) {
    throw DomainError("intrinsic_sup: guard must lie in (0, 1)");
  }
  const double threshold = f.lg0_peak + std::log(guard);
  const std::vector<double> diag =
      intrinsic_log_diag(f.gaps, f.log_abs_psi, f.lg0, threshold, t);
  IntrinsicSup out;
  out.t = t;
  out.log_sup = kNegInf;
  out.argmax = -1;
  for (int i = 0; i < f.nodes; ++i) {
    if (diag[i] > out.log_sup) {
      out.log_sup = diag[i];
      out.argmax = i;
    }
  }
  if (out.argmax < 0) {
    throw NumericError("intrinsic_sup: no admissible node above the guard");
  }
  // Flag suprema that sit against the admissibility edge: their true
  // location may be outside the guarded region.
  for (int d = 1; d <= 2; ++d) {
    for (int i : {out.argmax - d, out.argmax + d}) {
      if (i < 0 || i >= f.nodes) continue;
      if (diag[i] == kNegInf) out.near_guard = true;
    }
  }
  if (out.argmax <= 1 || out.argmax >= f.nodes - 2) out.near_guard = true;
  return out;
}

}  // namespace iukit
