#pragma once

// Small numerical helpers shared across the library: log-domain accumulation,
// a portable deterministic RNG, and least-squares line fits.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "iukit/errors.hpp"

namespace iukit {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Accumulates sum_i exp(l_i) for terms given as logs l_i, keeping only the
// log of the running total so the sum never overflows or underflows.
class LogAccumulator {
 public:
  void add(double log_term) {
    if (log_term == kNegInf) return;
    if (log_term <= peak_) {
      rest_ += std::exp(log_term - peak_);
    } else {
      rest_ = rest_ * std::exp(peak_ - log_term) + 1.0;
      peak_ = log_term;
    }
    ++count_;
  }

  double log_total() const {
    if (count_ == 0 || rest_ <= 0.0) return kNegInf;
    return peak_ + std::log(rest_);
  }

  std::size_t count() const { return count_; }

 private:
  double peak_ = kNegInf;
  double rest_ = 0.0;
  std::size_t count_ = 0;
};

// Signed variant: tracks positive and negative parts separately so that
// differences of huge terms can be formed in log space.
class SignedLogAccumulator {
 public:
  void add(double log_abs, int sign) {
    if (sign > 0) {
      pos_.add(log_abs);
    } else if (sign < 0) {
      neg_.add(log_abs);
    }
  }

  // Log of |total| and the sign of the total.
  std::pair<double, int> log_abs_total() const {
    const double lp = pos_.log_total();
    const double ln = neg_.log_total();
    if (lp == kNegInf && ln == kNegInf) return {kNegInf, 0};
    if (ln == kNegInf) return {lp, +1};
    if (lp == kNegInf) return {ln, -1};
    if (lp == ln) return {kNegInf, 0};
    const double hi = std::max(lp, ln);
    const double lo = std::min(lp, ln);
    const double mag = hi + std::log1p(-std::exp(lo - hi));
    return {mag, lp > ln ? +1 : -1};
  }

 private:
  LogAccumulator pos_;
  LogAccumulator neg_;
};

// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log(exp(a) - exp(b)) for a >= b.
inline double log_diff_exp(double a, double b) {
  if (b == kNegInf) return a;
  if (a <= b) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

// exp that saturates to +inf / 0 instead of raising range issues.
inline double exp_saturating(double x) {
  if (x > 709.0) return kPosInf;
  if (x < -745.0) return 0.0;
  return std::exp(x);
}

// Deterministic 64-bit generator (splitmix64). Used instead of <random>
// distributions because those are not bit-reproducible across standard
// library implementations.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d4a82111739b5bull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_range(double lo, double hi) { return lo + (hi - lo) * next_u01(); }

 private:
  std::uint64_t state_;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;
};

// Ordinary least squares for y ~ intercept + slope * x.
// Throws RankDeficientError when the abscissas do not span an interval.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw RankDeficientError("fit_line: need at least two samples");
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  double span = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    span = std::max(span, std::abs(x[i] - mx));
  }
  if (!(sxx > 0.0) || !(span > 1e-300)) {
    throw RankDeficientError("fit_line: abscissas are all equal");
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.max_abs_residual =
        std::max(fit.max_abs_residual, std::abs(y[i] - fit.intercept - fit.slope * x[i]));
  }
  return fit;
}

}  // namespace iukit
