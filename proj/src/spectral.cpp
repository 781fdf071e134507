#include "iukit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "iukit/errors.hpp"
#include "iukit/numerics.hpp"

namespace iukit {

namespace {

// Number of eigenvalues strictly below x, by the sign changes of the
// LDL' pivots. Division by a vanishing pivot saturates to infinity and the
// recurrence recovers on the next step.
int sturm_count_below(const SpectralModel& s, double x) {
  int count = 0;
  double q = s.diag[0] - x;
  if (q < 0.0) ++count;
  for (int i = 1; i < s.unknowns; ++i) {
    double den = q;
    if (den == 0.0) den = -1e-300;
    q = s.diag[i] - x - s.off[i - 1] * s.off[i - 1] / den;
    if (q < 0.0) ++count;
  }
  return count;
}

struct GershgorinBounds {
  double lo;
  double hi;
};

GershgorinBounds gershgorin(const SpectralModel& s) {
  GershgorinBounds b{kPosInf, kNegInf};
  for (int i = 0; i < s.unknowns; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(s.off[i - 1]);
    if (i + 1 < s.unknowns) radius += std::abs(s.off[i]);
    b.lo = std::min(b.lo, s.diag[i] - radius);
    b.hi = std::max(b.hi, s.diag[i] + radius);
  }
  return b;
}

// k-th smallest eigenvalue (0-based) bisected to near machine precision.
double bisect_eigenvalue(const SpectralModel& s, int k, const GershgorinBounds& b) {
  double lo = b.lo;
  double hi = b.hi;
  const double span = std::max({1.0, std::abs(lo), std::abs(hi)});
  while (hi - lo > 1e-14 * span) {
    const double mid = std::midpoint(lo, hi);
    if (mid == lo || mid == hi) break;
    if (sturm_count_below(s, mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::midpoint(lo, hi);
}

// Solves (A - sigma I) x = rhs by partial-pivot elimination on the three
// bands plus one fill band. Pivots are floored in magnitude so the shifted
// solve stays usable arbitrarily close to an eigenvalue.
std::vector<double> shifted_solve(const SpectralModel& s, double sigma,
                                  std::vector<double> rhs, double pivot_floor) {
  const int n = s.unknowns;
  std::vector<double> d(n), e(n, 0.0), f(n, 0.0), c(n, 0.0);
  for (int i = 0; i < n; ++i) d[i] = s.diag[i] - sigma;
  for (int i = 0; i + 1 < n; ++i) {
    e[i] = s.off[i];
    c[i + 1] = s.off[i];
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (std::abs(c[i + 1]) > std::abs(d[i])) {
      std::swap(d[i], c[i + 1]);
      std::swap(e[i], d[i + 1]);
      if (i + 2 < n) std::swap(f[i], e[i + 1]);
      std::swap(rhs[i], rhs[i + 1]);
    }
    double piv = d[i];
    if (std::abs(piv) < pivot_floor) piv = std::copysign(pivot_floor, piv == 0.0 ? 1.0 : piv);
    const double l = c[i + 1] / piv;
    d[i + 1] -= l * e[i];
    if (i + 2 < n) e[i + 1] -= l * f[i];
    rhs[i + 1] -= l * rhs[i];
    d[i] = piv;
  }
  if (std::abs(d[n - 1]) < pivot_floor) {
    d[n - 1] = std::copysign(pivot_floor, d[n - 1] == 0.0 ? 1.0 : d[n - 1]);
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double v = rhs[i];
    if (i + 1 < n) v -= e[i] * x[i + 1];
    if (i + 2 < n) v -= f[i] * x[i + 2];
    x[i] = v / d[i];
  }
  return x;
}

void normalize(std::vector<double>* v) {
  double norm2 = 0.0;
  for (double x : *v) norm2 += x * x;
  const double norm = std::sqrt(norm2);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw NonConvergenceError("inverse iteration produced a degenerate vector");
  }
  for (double& x : *v) x /= norm;
}

void subtract_projection(std::vector<double>* v, const std::vector<double>& onto) {
  double dot = 0.0;
  for (std::size_t i = 0; i < v->size(); ++i) dot += (*v)[i] * onto[i];
  for (std::size_t i = 0; i < v->size(); ++i) (*v)[i] -= dot * onto[i];
}

}  // namespace

SpectralModel discretize(const ModelManifold& m, const Potential& v,
                         double inner_radius) {
  if (inner_radius < 0.0 || !std::isfinite(inner_radius)) {
    throw DomainError("discretize: inner radius must be finite and non-negative");
  }
  const RadialMeasure mu = measure_density(m, v);
  SpectralModel s;
  s.grid = m.grid;
  s.dim = m.dim;
  s.inner_radius = inner_radius;
  s.first_node = 1;
  while (s.first_node < m.grid.n - 1 && m.grid.node(s.first_node) <= inner_radius) {
    ++s.first_node;
  }
  s.unknowns = m.grid.n - 1 - s.first_node;
  if (s.unknowns < 4) throw DomainError("discretize: grid too small");
  const double h = m.grid.spacing();

  s.log_cell_mass.resize(s.unknowns);
  for (int i = 0; i < s.unknowns; ++i) {
    const int node = i + s.first_node;
    const double la = mu.log_w_fine[2 * node - 1];
    const double lm = mu.log_w_fine[2 * node];
    const double lb = mu.log_w_fine[2 * node + 1];
    s.log_cell_mass[i] =
        std::log(h / 6.0) + log_add_exp(log_add_exp(la, std::log(4.0) + lm), lb);
  }

  // Flux coefficients live at half steps. For the full problem the pole-side
  // flux of the first cell is dropped, which is the no-flux condition at the
  // origin; with an inner boundary that flux couples to a pinned zero node
  // and stays in the diagonal.
  s.diag.assign(s.unknowns, 0.0);
  s.off.assign(s.unknowns - 1, 0.0);
  for (int i = 0; i < s.unknowns; ++i) {
    const int node = i + s.first_node;
    const double lv = s.log_cell_mass[i];
    double a = std::exp(mu.log_w_fine[2 * node + 1] - lv) / h;
    if (i > 0 || s.first_node > 1) a += std::exp(mu.log_w_fine[2 * node - 1] - lv) / h;
    s.diag[i] = a;
    if (i + 1 < s.unknowns) {
      s.off[i] = -std::exp(mu.log_w_fine[2 * node + 1] -
                           0.5 * (lv + s.log_cell_mass[i + 1])) /
                 h;
    }
    if (!std::isfinite(s.diag[i]) || (i + 1 < s.unknowns && !std::isfinite(s.off[i]))) {
      throw NumericError("discretize: non-finite matrix entry at node " +
                         std::to_string(node));
    }
  }
  return s;
}

double exterior_eigenvalue_on_grid(const ModelManifold& m, const Potential& v,
                                   double big_r) {
  if (!(big_r > 0.0) || !(big_r < m.grid.r_max - 1.0)) {
    throw DomainError("exterior_eigenvalue: radius must lie in (0, r_max - 1)");
  }
  const SpectralModel s = discretize(m, v, big_r);
  return lowest_eigenvalues(s, 1)[0];
}

namespace {

ModelManifold tail_doubled(const ModelManifold& m) {
  const RadialGrid doubled{2.0 * m.grid.r_max, 2 * (m.grid.n - 1) + 1};
  return solve_warping(m.k, doubled, m.dim);
}

double audited_exterior(const ModelManifold& m, const ModelManifold& doubled,
                        const Potential& v, double big_r) {
  const double lam = exterior_eigenvalue_on_grid(m, v, big_r);
  const double lam_far = exterior_eigenvalue_on_grid(doubled, v, big_r);
  if (std::abs(lam - lam_far) > 0.01 * std::abs(lam_far)) {
    throw RMaxTooSmallError("exterior eigenvalue at radius " + std::to_string(big_r) +
                            " moved from " + std::to_string(lam) + " to " +
                            std::to_string(lam_far) + " under tail doubling");
  }
  return lam;
}

}  // namespace

double exterior_eigenvalue(const ModelManifold& m, const Potential& v, double big_r) {
  return audited_exterior(m, tail_doubled(m), v, big_r);
}

ExteriorCurve exterior_curve(const ModelManifold& m, const Potential& v,
                             std::span<const double> radii) {
  if (radii.empty()) throw DomainError("exterior_curve: no radii given");
  for (std::size_t j = 1; j < radii.size(); ++j) {
    if (!(radii[j] > radii[j - 1])) {
      throw DomainError("exterior_curve: radii must be strictly increasing");
    }
  }
  const ModelManifold doubled = tail_doubled(m);
  ExteriorCurve curve;
  curve.radii.assign(radii.begin(), radii.end());
  curve.values.reserve(radii.size());
  for (double r : radii) {
    curve.values.push_back(audited_exterior(m, doubled, v, r));
  }
  for (std::size_t j = 1; j < curve.values.size(); ++j) {
    if (curve.values[j] < curve.values[j - 1]) {
      throw NumericError("exterior eigenvalues violated domain monotonicity");
    }
  }
  return curve;
}

double lambda0_inverse_curve(const ExteriorCurve& curve, double y) {
  const std::size_t count = curve.radii.size();
  if (count == 0 || curve.values.size() != count) {
    throw DomainError("lambda0_inverse_curve: malformed curve");
  }
  if (!std::isfinite(y)) throw DomainError("lambda0_inverse_curve: y must be finite");
  if (y > curve.values.back()) {
    throw OutOfRangeError("lambda0_inverse_curve: y above the tabulated maximum");
  }
  if (y <= curve.values.front()) return curve.radii.front();
  std::size_t j = 1;
  while (curve.values[j] < y) ++j;
  const double v0 = curve.values[j - 1];
  const double v1 = curve.values[j];
  const double w = (y - v0) / (v1 - v0);
  return curve.radii[j - 1] + w * (curve.radii[j] - curve.radii[j - 1]);
}

std::vector<double> lowest_eigenvalues(const SpectralModel& s, int count) {
  if (count < 1) throw DomainError("lowest_eigenvalues: count must be positive");
  if (count > s.unknowns) {
    throw InsufficientModesError("requested " + std::to_string(count) +
                                 " modes from a matrix of size " +
                                 std::to_string(s.unknowns));
  }
  const GershgorinBounds b = gershgorin(s);
  std::vector<double> lambdas(count);
#ifdef IUKIT_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int k = 0; k < count; ++k) {
    lambdas[k] = bisect_eigenvalue(s, k, b);
  }
  for (int k = 0; k + 1 < count; ++k) {
    if (!(lambdas[k] <= lambdas[k + 1])) {
      throw NumericError("eigenvalue bisection produced a non-monotone sequence");
    }
  }
  return lambdas;
}

EigenSystem solve_modes(const SpectralModel& s, int count) {
  EigenSystem es;
  es.lambdas = lowest_eigenvalues(s, count);
  es.psi.resize(count);

  const GershgorinBounds b = gershgorin(s);
  const double scale = std::max(std::abs(b.lo), std::abs(b.hi));
  const double pivot_floor = 1e-14 * std::max(1.0, scale);
  const double cluster_gap = 1e-9 * std::max(1.0, scale);

  for (int k = 0; k < count; ++k) {
    DeterministicRng rng(0x5eedULL + static_cast<unsigned long long>(k));
    std::vector<double> v(s.unknowns);
    for (double& x : v) x = rng.next_u01() - 0.5;
    normalize(&v);

    bool converged = false;
    for (int iter = 0; iter < 12; ++iter) {
      v = shifted_solve(s, es.lambdas[k], std::move(v), pivot_floor);
      for (int j = k - 1; j >= 0; --j) {
        if (es.lambdas[k] - es.lambdas[j] < cluster_gap) {
          subtract_projection(&v, es.psi[j]);
        } else {
          break;
        }
      }
      normalize(&v);
      const std::vector<double> av = apply_operator(s, v);
      double res = 0.0;
      for (int i = 0; i < s.unknowns; ++i) {
        res = std::max(res, std::abs(av[i] - es.lambdas[k] * v[i]));
      }
      if (res <= 1e-10 * std::max(1.0, scale)) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NonConvergenceError("inverse iteration stalled for mode " +
                                std::to_string(k));
    }
    es.psi[k] = std::move(v);
  }

  // Sign-fix the ground state and insist on positivity of its significant
  // entries; entries at rounding level may carry noise signs.
  std::vector<double>& psi0 = es.psi[0];
  double sum = 0.0;
  double peak = 0.0;
  for (double x : psi0) {
    sum += x;
    peak = std::max(peak, std::abs(x));
  }
  if (sum < 0.0) {
    for (double& x : psi0) x = -x;
  }
  for (double x : psi0) {
    if (x < -1e-10 * peak) {
      throw NumericError("ground state came out with mixed signs");
    }
  }
  return es;
}

std::vector<double> apply_operator(const SpectralModel& s, const std::vector<double>& psi) {
  if (static_cast<int>(psi.size()) != s.unknowns) {
    throw DomainError("apply_operator: size mismatch");
  }
  std::vector<double> out(s.unknowns);
  for (int i = 0; i < s.unknowns; ++i) {
    double acc = s.diag[i] * psi[i];
    if (i > 0) acc += s.off[i - 1] * psi[i - 1];
    if (i + 1 < s.unknowns) acc += s.off[i] * psi[i + 1];
    out[i] = acc;
  }
  return out;
}

double rayleigh_quotient(const SpectralModel& s, const std::vector<double>& psi) {
  const std::vector<double> av = apply_operator(s, psi);
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < s.unknowns; ++i) {
    num += psi[i] * av[i];
    den += psi[i] * psi[i];
  }
  if (!(den > 0.0)) throw DomainError("rayleigh_quotient: zero vector");
  return num / den;
}

std::vector<double> log_ground_state(const SpectralModel& s, const EigenSystem& es) {
  const std::vector<double>& psi0 = es.psi0();
  std::vector<double> out(s.unknowns);
  for (int i = 0; i < s.unknowns; ++i) {
    const double a = std::abs(psi0[i]);
    out[i] = a > 0.0 ? std::log(a) - 0.5 * s.log_cell_mass[i] : kNegInf;
  }
  return out;
}

std::vector<double> effective_potential(const SpectralModel& s) {
  std::vector<double> w(s.unknowns);
  for (int i = 0; i < s.unknowns; ++i) {
    double acc = s.diag[i];
    if (i > 0) acc += s.off[i - 1];
    if (i + 1 < s.unknowns) acc += s.off[i];
    w[i] = acc;
  }
  return w;
}

namespace {

// One backward march from the Dirichlet boundary down to a glue anchor.
// Row i+1 reads off[i] u_i + diag[i+1] u_{i+1} + off[i+1] u_{i+2} =
// lambda u_{i+1}, with the ghost value beyond the boundary equal to zero.
// Rescaling keeps the inward-growing values finite; logs absorb the scale.
TailExtension try_extension(const SpectralModel& s, double lambda,
                            const std::vector<double>& psi, int glue) {
  constexpr double kCheck = 1e-13;
  const int n = s.unknowns;
  TailExtension none;
  std::vector<double> la(n, kNegInf);
  double u1 = 1.0;  // u at index i+1
  double u2 = 0.0;  // u at index i+2
  double logscale = 0.0;
  la[n - 1] = 0.0;
  for (int i = n - 2; i >= glue; --i) {
    const double rhs = (lambda - s.diag[i + 1]) * u1 -
                       (i + 2 < n ? s.off[i + 1] * u2 : 0.0);
    const double u0 = rhs / s.off[i];
    la[i] = u0 != 0.0 ? std::log(std::abs(u0)) + logscale : kNegInf;
    u2 = u1;
    u1 = u0;
    const double mag = std::abs(u1);
    if (mag > 1e100) {
      u1 /= mag;
      u2 /= mag;
      logscale += std::log(mag);
    }
  }
  if (la[glue] == kNegInf) return none;
  const double offset = std::log(std::abs(psi[glue])) - la[glue];
  // The rebuilt tail must reproduce the solver wherever both are reliable.
  // The tolerance widens as the solver component sinks toward its absolute
  // noise floor; the check guards against gluing onto the wrong branch or
  // onto a vector whose tail mixes a near-degenerate partner.
  int agreed = 0;
  for (int i = glue + 1; i < n - 1 && i <= glue + 4; ++i) {
    const double a = std::abs(psi[i]);
    if (a < kCheck) break;
    if (std::abs(la[i] + offset - std::log(a)) > 1e-4 + 1e-13 / a) return none;
    ++agreed;
  }
  if (agreed == 0) return none;
  TailExtension ext;
  ext.glue = glue;
  ext.log_abs = std::move(la);
  for (int i = glue; i < n; ++i) {
    if (ext.log_abs[i] != kNegInf) ext.log_abs[i] += offset;
  }
  return ext;
}

}  // namespace

TailExtension mode_tail_extension(const SpectralModel& s, double lambda,
                                  const std::vector<double>& psi) {
  const int n = s.unknowns;
  if (static_cast<int>(psi.size()) != n) {
    throw DomainError("mode_tail_extension: vector length mismatch");
  }
  TailExtension none;
  if (n < 8) return none;
  const std::vector<double> w = effective_potential(s);
  // Smallest index from which every remaining row is forbidden.
  int start = n;
  for (int i = n - 1; i >= 0 && w[i] > lambda; --i) start = i;
  if (start >= n - 4) return none;
  // Anchor at the outermost forbidden node whose solver component clears the
  // threshold. When the overlap check rejects an anchor, retry deeper into
  // the well, where the component is further above the contamination level.
  for (double solid : {1e-8, 1e-6, 1e-4}) {
    int glue = -1;
    for (int i = n - 1; i >= start; --i) {
      if (std::abs(psi[i]) >= solid) {
        glue = i;
        break;
      }
    }
    if (glue < 0 || glue >= n - 4) continue;
    TailExtension ext = try_extension(s, lambda, psi, glue);
    if (ext.glue >= 0) return ext;
  }
  return none;
}

}  // namespace iukit
