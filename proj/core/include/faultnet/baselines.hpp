#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "faultnet/model.hpp"

namespace faultnet {

// Result of a centralized iterative estimator. q holds the EM responsibilities
// (probability of a nominal sensor) and stays empty for the label-based IML;
// omega is filled by both (EM thresholds q at 1/2, ties to faulty).
struct IterativeResult {
  double theta = 0.0;
  std::vector<Label> omega;
  std::vector<double> q;
  std::uint64_t iterations = 0;
  bool converged = false;
  std::vector<double> theta_trace;
  std::vector<double> objective_trace;  // EM only: mean observed-data log-lik
};

// Alternates theta <- weighted_theta(omega, y) and omega <- classify(theta)
// from the all-nominal labeling; stops when successive theta values differ by
// less than eps. Label cycles exhaust max_iter and return converged=false.
IterativeResult iml_run(std::span<const double> y, const ModelParams& params,
                        double eps = 1e-10, std::uint64_t max_iter = 10'000);

// Expectation-maximization over theta with known mixture weights. theta0
// defaults to the plain mean of y.
IterativeResult em_run(std::span<const double> y, const ModelParams& params,
                       std::optional<double> theta0 = std::nullopt,
                       double eps = 1e-10, std::uint64_t max_iter = 10'000);

}  // namespace faultnet
