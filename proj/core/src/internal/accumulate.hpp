#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace faultnet::internal {

// Neumaier-compensated accumulator: one fixed evaluation order, error O(eps)
// independent of n.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + carry; }
};

// Pairwise reduction; the grouping depends only on the element count, so the
// result is identical no matter how the values were produced.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    CompensatedSum acc;
    for (double x : v) acc.add(x);
    return acc.value();
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_mean(std::span<const double> v) {
  return v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size());
}

}  // namespace faultnet::internal
