#pragma once

#include <cmath>
#include <span>

namespace fairdiv {

/// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

/// Pairwise (cascade) summation.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample standard deviation / sqrt(count); 0 for one sample
  std::size_t count = 0;

  double lower(double z = kZ99) const { return mean - z * stderr_; }
  double upper(double z = kZ99) const { return mean + z * stderr_; }
};

inline MeanEstimate estimate_mean(std::span<const double> xs) {
  MeanEstimate e;
  e.count = xs.size();
  if (xs.empty()) return e;
  e.mean = pairwise_sum(xs) / double(xs.size());
  if (xs.size() < 2) return e;
  double ss = 0.0;
  for (double x : xs) ss += (x - e.mean) * (x - e.mean);
  e.stderr_ = std::sqrt(ss / double(xs.size() - 1)) / std::sqrt(double(xs.size()));
  return e;
}

}  // namespace fairdiv
