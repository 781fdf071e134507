#pragma once

// Hot inner loops in two flavors: an OpenMP-parallel one used by default and
// a serial reference used by tests and the benchmark. Both accumulate each
// output entry in the same order, so results are bitwise identical.

#include <span>
#include <vector>

namespace iukit {

// For each node i, log of sum_j exp(-gaps[j] t + 2 (log_abs_psi[i J + j] -
// lg0[i])), the diagonal of the intrinsically rescaled heat kernel. Nodes
// with lg0[i] < threshold get -inf.
std::vector<double> intrinsic_log_diag_serial(std::span<const double> gaps,
                                              std::span<const double> log_abs_psi,
                                              std::span<const double> lg0,
                                              double threshold, double t);
std::vector<double> intrinsic_log_diag(std::span<const double> gaps,
                                       std::span<const double> log_abs_psi,
                                       std::span<const double> lg0,
                                       double threshold, double t);

// Spectral synthesis of one kernel row: for each node i, the signed
// log-space sum over modes of exp(-lambdas[j] t) psi_j(a) psi_j(i), split
// into magnitude and sign.
struct SignedLog {
  double log_abs;
  int sign;
};
std::vector<SignedLog> kernel_row_serial(std::span<const double> lambdas,
                                         std::span<const double> psi_flat,
                                         int nodes, int anchor, double t);
std::vector<SignedLog> kernel_row_parallel(std::span<const double> lambdas,
                                           std::span<const double> psi_flat,
                                           int nodes, int anchor, double t);

}  // namespace iukit
