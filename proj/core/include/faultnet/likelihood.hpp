#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "faultnet/model.hpp"

namespace faultnet {

// Open interval between consecutive classification breakpoints {y_i +- delta};
// the active set {i : |y_i - theta| < delta} is constant on it.
struct ProfileSegment {
  double lo;  // -inf for the leftmost segment
  double hi;  // +inf for the rightmost
  std::vector<std::uint32_t> active;    // indices labeled alpha inside the interval
  std::optional<double> candidate;      // stationary point, if strictly inside
};

struct StationarySet {
  std::vector<double> points;  // ascending
  std::vector<double> values;  // profile log-likelihood at each point
  std::size_t argmax = 0;      // global max; ties resolved to the smallest theta
  // Diagnostics: the segment decomposition assumes distinct breakpoints and
  // candidates strictly interior. Coincident breakpoints are merged and flagged.
  bool degenerate_breakpoints = false;
  // Breakpoints whose one-sided derivatives bracket a local maximum. The
  // derivative jump at every breakpoint is upward, so this stays empty; it is
  // reported rather than assumed.
  std::vector<double> breakpoint_maxima;
};

struct MlSolution {
  double theta;
  std::vector<Label> omega;
  double value;
};

// Mean over j of log f(y_j, omega_j | theta) under the two-level Gaussian model.
double log_likelihood(double theta, std::span<const Label> omega,
                      std::span<const double> y, const ModelParams& params);

// log_likelihood with labels maximized out pointwise: L(theta, classify(theta)).
double profile_value(double theta, std::span<const double> y,
                     const ModelParams& params);

// d/dtheta of the profile; throws NonDifferentiablePointError at breakpoints.
double profile_derivative(double theta, std::span<const double> y,
                          const ModelParams& params);

// The <= 2n+1 open intervals with their active sets and interior candidates.
std::vector<ProfileSegment> profile_segments(std::span<const double> y,
                                             const ModelParams& params);

// All theta with theta = weighted_theta(classify(theta)), i.e. the local maxima
// of the profile log-likelihood. O(n log n) via sorted prefix sums.
StationarySet enumerate_stationary(std::span<const double> y,
                                   const ModelParams& params);

// Global maximizer over the stationary set, with its labels and value.
MlSolution ml_solution(std::span<const double> y, const ModelParams& params);

}  // namespace faultnet
