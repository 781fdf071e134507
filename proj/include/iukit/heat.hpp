#pragma once

// Heat evolution for the discrete radial operator: spectral synthesis of
// kernel values, Crank-Nicolson time stepping as an independent path, and
// the supremum of the intrinsically rescaled kernel that drives the
// ultracontractivity checks. Kernel values are taken with respect to the
// weighted radial measure.

#include <vector>

#include "iukit/kernels.hpp"
#include "iukit/spectral.hpp"

namespace iukit {

struct KernelValue {
  double log_abs = 0.0;
  int sign = 0;
  double value() const;
};

// h(a, b, t) from the mode sum; indices are interior-node indices.
KernelValue kernel_value(const SpectralModel& s, const EigenSystem& es, int ia,
                         int ib, double t);
std::vector<KernelValue> kernel_row(const SpectralModel& s, const EigenSystem& es,
                                    int ia, double t);

// Upper bound on what the modes beyond the computed ones can add to
// h(ia, ia, t), as a logarithm; -inf when the eigensystem is complete.
double log_kernel_truncation(const SpectralModel& s, const EigenSystem& es,
                             int ia, double t);

// psi-space state for a unit point mass at interior node idx.
std::vector<double> psi_point_mass(const SpectralModel& s, int idx);
// Conversions between function values at interior nodes and psi space.
std::vector<double> psi_from_values(const SpectralModel& s,
                                    const std::vector<double>& u);
std::vector<double> values_from_psi(const SpectralModel& s,
                                    const std::vector<double>& psi);

// Crank-Nicolson evolution over [0, t] in uniform steps.
std::vector<double> evolve_cn(const SpectralModel& s, std::vector<double> psi,
                              double t, int steps);
// Mode-sum evolution of the same state; exact for the discrete operator
// when the eigensystem is complete.
std::vector<double> evolve_spectral(const SpectralModel& s, const EigenSystem& es,
                                    const std::vector<double>& psi, double t);

// Precomputed logs for the intrinsic-ratio kernels. Requires the complete
// eigensystem of the model, so the mode sum carries no truncation error.
struct IntrinsicField {
  int nodes = 0;
  int modes = 0;
  std::vector<double> gaps;          // lambda_j - lambda_0
  std::vector<double> log_abs_psi;   // node-major: [i * modes + j]
  std::vector<double> lg0;           // log |psi_0| per node
  double lg0_peak = 0.0;
  double lambda0 = 0.0;
};
IntrinsicField build_intrinsic_field(const SpectralModel& s, const EigenSystem& es);

struct IntrinsicSup {
  double t = 0.0;
  double log_sup = 0.0;  // log sup_a e^{lambda0 t} h(a, a, t) / phi0(a)^2
  int argmax = 0;
  bool near_guard = false;  // argmax within two nodes of the guard boundary
};

// The supremum over the diagonal equals the supremum over all pairs, by
// positivity of the rescaled kernel form. Nodes where psi_0 is below
// guard * max |psi_0| are excluded to keep the quotient representable.
IntrinsicSup intrinsic_sup(const IntrinsicField& f, double t, double guard = 1e-280);

}  // namespace iukit
