#include "iukit/kernels.hpp"

#include <cmath>

#include "iukit/numerics.hpp"

namespace iukit {

namespace {

double diag_entry(std::span<const double> gaps, std::span<const double> log_abs_psi,
                  std::span<const double> lg0, double threshold, double t, int i) {
  if (!(lg0[i] >= threshold)) return kNegInf;
  const int modes = static_cast<int>(gaps.size());
  LogAccumulator acc;
  const double* row = log_abs_psi.data() + static_cast<std::size_t>(i) * modes;
  for (int j = 0; j < modes; ++j) {
    acc.add(-gaps[j] * t + 2.0 * (row[j] - lg0[i]));
  }
  return acc.log_total();
}

SignedLog row_entry(std::span<const double> lambdas, std::span<const double> psi_flat,
                    int nodes, int anchor, double t, int i) {
  const int modes = static_cast<int>(lambdas.size());
  SignedLogAccumulator acc;
  for (int j = 0; j < modes; ++j) {
    const double pa = psi_flat[static_cast<std::size_t>(j) * nodes + anchor];
    const double pi = psi_flat[static_cast<std::size_t>(j) * nodes + i];
    const double prod = pa * pi;
    if (prod == 0.0) continue;
    acc.add(-lambdas[j] * t + std::log(std::abs(pa)) + std::log(std::abs(pi)),
            prod > 0.0 ? +1 : -1);
  }
  const auto [log_abs, sign] = acc.log_abs_total();
  return {log_abs, sign};
}

}  // namespace

std::vector<double> intrinsic_log_diag_serial(std::span<const double> gaps,
                                              std::span<const double> log_abs_psi,
                                              std::span<const double> lg0,
                                              double threshold, double t) {
  const int nodes = static_cast<int>(lg0.size());
  std::vector<double> out(nodes);
  for (int i = 0; i < nodes; ++i) {
    out[i] = diag_entry(gaps, log_abs_psi, lg0, threshold, t, i);
  }
  return out;
}

std::vector<double> intrinsic_log_diag(std::span<const double> gaps,
                                       std::span<const double> log_abs_psi,
                                       std::span<const double> lg0,
                                       double threshold, double t) {
  const int nodes = static_cast<int>(lg0.size());
  std::vector<double> out(nodes);
#ifdef IUKIT_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < nodes; ++i) {
    out[i] = diag_entry(gaps, log_abs_psi, lg0, threshold, t, i);
  }
  return out;
}

std::vector<SignedLog> kernel_row_serial(std::span<const double> lambdas,
                                         std::span<const double> psi_flat,
                                         int nodes, int anchor, double t) {
  std::vector<SignedLog> out(nodes);
  for (int i = 0; i < nodes; ++i) {
    out[i] = row_entry(lambdas, psi_flat, nodes, anchor, t, i);
  }
  return out;
}

std::vector<SignedLog> kernel_row_parallel(std::span<const double> lambdas,
                                           std::span<const double> psi_flat,
                                           int nodes, int anchor, double t) {
  std::vector<SignedLog> out(nodes);
#ifdef IUKIT_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < nodes; ++i) {
    out[i] = row_entry(lambdas, psi_flat, nodes, anchor, t, i);
  }
  return out;
}

}  // namespace iukit
