#pragma once

#include <stdexcept>

namespace faultnet {

// Invalid user-supplied parameter or malformed input.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The over-threshold classifier is undefined: ((1-p)/p)*(beta/alpha) <= 1.
struct DegenerateThresholdError : std::domain_error {
  using std::domain_error::domain_error;
};

// Topology construction failed (bad dimensions, connectivity retries exhausted, ...).
struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Profile log-likelihood has no derivative at a classification breakpoint.
struct NonDifferentiablePointError : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace faultnet
