// SPDX-License-Identifier: MIT
//
// Small running-statistics helper (Welford accumulation) used for trial
// aggregation.

#pragma once

#include <cmath>
#include <cstdint>

namespace timefork {

// Numerically stable running mean/variance accumulator.
class RunningStats {
 public:
  void add(double x) {
    n_ += 1;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }

  // Sample variance (n-1 denominator); 0 for fewer than two samples.
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }

  // Standard error of the mean; 0 for fewer than two samples.
  double stderr_mean() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Pooled standard error of the difference between two means.
inline double pooled_stderr(const RunningStats& a, const RunningStats& b) {
  const double sa = a.stderr_mean();
  const double sb = b.stderr_mean();
  return std::sqrt(sa * sa + sb * sb);
}

}  // namespace timefork
