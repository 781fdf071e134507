#pragma once

// Discrete radial operator -(1/w)(w u')' on (0, r_max) with a no-flux pole
// and a Dirichlet boundary, symmetrized against the cell masses so the
// eigenproblem is a plain symmetric tridiagonal one. Eigenvalues come from
// Sturm-count bisection, eigenvectors from shifted inverse iteration. A
// positive inner radius replaces the pole condition with a second Dirichlet
// boundary for exterior problems.

#include <span>
#include <vector>

#include "iukit/geometry.hpp"

namespace iukit {

struct SpectralModel {
  RadialGrid grid;
  int dim = 2;
  int unknowns = 0;       // active nodes first_node .. n-2
  int first_node = 1;     // > 1 means Dirichlet at node first_node - 1
  double inner_radius = 0.0;

  // Symmetrized tridiagonal matrix: diag has `unknowns` entries, off one
  // fewer. Eigenvectors psi relate to function values by
  // u(node_radius(i)) = psi[i] * exp(-log_cell_mass[i] / 2).
  std::vector<double> diag;
  std::vector<double> off;
  std::vector<double> log_cell_mass;

  double node_radius(int idx) const { return grid.node(idx + first_node); }
};

// inner_radius = 0 gives the full problem with the no-flux pole; a positive
// inner_radius excludes every node at radius <= inner_radius and pins the
// last excluded node to zero.
SpectralModel discretize(const ModelManifold& m, const Potential& v,
                         double inner_radius = 0.0);

struct EigenSystem {
  std::vector<double> lambdas;            // ascending
  std::vector<std::vector<double>> psi;   // unit vectors in the psi metric

  int modes() const { return static_cast<int>(lambdas.size()); }
  double lambda0() const { return lambdas.at(0); }
  const std::vector<double>& psi0() const { return psi.at(0); }
};

// Lowest `count` eigenvalues by bisection on the Sturm count. Throws
// InsufficientModesError when count exceeds the matrix size.
std::vector<double> lowest_eigenvalues(const SpectralModel& s, int count);

// Eigenvalues plus inverse-iteration eigenvectors. The ground state is
// sign-fixed to be positive; clustered modes are re-orthogonalized.
EigenSystem solve_modes(const SpectralModel& s, int count);

// psi' A psi / psi' psi for diagnostics and tests.
double rayleigh_quotient(const SpectralModel& s, const std::vector<double>& psi);

// Matrix-vector product with the symmetrized operator.
std::vector<double> apply_operator(const SpectralModel& s, const std::vector<double>& psi);

// log of the ground state as a function value at interior nodes; entries
// whose psi component underflowed are -inf.
std::vector<double> log_ground_state(const SpectralModel& s, const EigenSystem& es);

// Action of the operator on the all-ones vector. The pure difference part
// annihilates constants, so entry i is the effective local potential at
// node i; rows where it exceeds an eigenvalue are classically forbidden
// for that mode.
std::vector<double> effective_potential(const SpectralModel& s);

// Inverse-iteration vectors carry absolute rounding noise of roughly
// machine precision per component, so components far below that are
// meaningless. The decaying tail can be rebuilt to relative accuracy by
// the backward three-term recurrence from the Dirichlet boundary, which
// amplifies the physical branch when every remaining row is forbidden.
struct TailExtension {
  int glue = -1;                // entries with index > glue are rebuilt; -1 means none
  std::vector<double> log_abs;  // log |psi| for index >= glue, -inf elsewhere
};

// Rebuilds log |psi| beyond the outermost node where the solver vector is
// both classically forbidden and comfortably above rounding noise, and
// cross-checks the overlap before accepting. Returns glue = -1 when no
// valid extension exists (oscillatory tails, or nothing left to extend).
TailExtension mode_tail_extension(const SpectralModel& s, double lambda,
                                  const std::vector<double>& psi);

// Bottom Dirichlet eigenvalue outside the ball of radius big_r, on the
// model's own grid. No truncation audit; see exterior_eigenvalue.
double exterior_eigenvalue_on_grid(const ModelManifold& m, const Potential& v,
                                   double big_r);

// Same value, audited against a tail-doubled grid at the same spacing.
// Throws RMaxTooSmallError when doubling moves the value by more than 1%,
// which happens when the exterior bottom is set by the escaping tail rather
// than a localized state.
double exterior_eigenvalue(const ModelManifold& m, const Potential& v, double big_r);

struct ExteriorCurve {
  std::vector<double> radii;   // strictly increasing
  std::vector<double> values;  // non-decreasing by domain monotonicity
};

// Audited exterior eigenvalues along increasing radii; the tail-doubled
// manifold is built once and shared across the radii.
ExteriorCurve exterior_curve(const ModelManifold& m, const Potential& v,
                             std::span<const double> radii);

// Smallest R with lambda0(exterior of B_R) >= y, linearly interpolated
// between tabulated brackets. Throws OutOfRangeError when y exceeds the
// tabulated maximum.
double lambda0_inverse_curve(const ExteriorCurve& curve, double y);

}  // namespace iukit
