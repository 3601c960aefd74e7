#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "faultnet/graph.hpp"
#include "faultnet/model.hpp"

namespace faultnet {

// Step-size sequence gamma(t). Values are clamped to [1e-12, 1 - 1e-12]: the
// convergence hypotheses require gamma in (0,1), and only early steps are
// affected by the clamp.
class GammaSchedule {
 public:
  // gamma(t) = (t + t_offset)^(-zeta), zeta in (0,1).
  static GammaSchedule power(double zeta, std::uint64_t t_offset = 1);
  // gamma(t) = log(t + t_offset)^a / (t + t_offset), a > 0.
  static GammaSchedule log_power(double a, std::uint64_t t_offset = 1);

  double value(std::uint64_t t) const;
  double exponent() const { return param_; }

 private:
  enum class Family : std::uint8_t { kPower, kLogPower };
  GammaSchedule(Family family, double param, std::uint64_t t_offset);

  Family family_;
  double param_;
  std::uint64_t t_offset_;
};

// Termination policy for ia_run. The run stops when either
//  (a) the labels are unchanged for w_stable steps, the per-step estimate
//      movement is below eps_theta, and the spread max theta - min theta is
//      below eps_consensus; or
//  (b) the labels are unchanged for w_stable steps, they reproduce themselves
//      under classification at their own weighted estimate, and every node's
//      estimate is within margin_factor of its distance to the nearest
//      classification boundary.
// Path (b) exists because the estimates approach consensus only at rate
// gamma(t), so path (a) with tight tolerances cannot fire in any practical
// horizon; path (b) detects that the label vector can no longer change.
struct StopRule {
  std::uint64_t w_stable = 500;
  double eps_theta = 1e-10;
  double eps_consensus = 1e-8;
  std::uint64_t t_max = 1'000'000;
  double margin_factor = 0.5;
};

// Per-node state after t steps. theta_hat is NaN at t=0 (mu/nu = 0/0) and
// equals mu/nu elementwise for t >= 1.
struct NetworkState {
  std::uint64_t t = 0;
  std::vector<double> mu;
  std::vector<double> nu;
  std::vector<double> theta_hat;
  std::vector<Label> omega_hat;

  std::size_t size() const { return mu.size(); }
};

// Sampled trace row: mean estimate, disagreement norm ||(I - J/n) theta||_2,
// and the number of label flips produced by the step that reached time t.
struct IaTracePoint {
  std::uint64_t t = 0;
  double gamma = 0.0;
  double theta_bar = 0.0;
  double consensus_norm = 0.0;
  std::uint32_t flips = 0;
};

struct IaRunResult {
  // Analytic limit weighted_theta(omega_limit, y); the truncated iterate mean
  // is kept in theta_bar_final and the gap in fixed_point_residual.
  double theta_limit = 0.0;
  std::vector<Label> omega_limit;
  std::uint64_t iterations = 0;
  std::uint64_t stabilization_time = 0;  // last t at which omega changed
  bool converged = false;
  double theta_bar_final = 0.0;
  double fixed_point_residual = 0.0;
  std::vector<IaTracePoint> trace;
};

struct ConsensusDiagnostics {
  std::uint64_t stabilization_time = 0;
  std::vector<std::uint64_t> times;
  std::vector<double> c_estimates;  // ||(I - J/n) theta(t)||_2 / gamma(t)
};

// t=0 state: mu = nu = 0, omega all alpha, theta undefined (NaN).
NetworkState ia_init(std::span<const double> y);

// One synchronous update from time state.t to state.t + 1:
//   mu'  = (1-g) P mu + g (y_i / sigma_i^2),  nu' = (1-g) P nu + g / sigma_i^2,
//   theta' = mu'/nu',  omega'_i = alpha iff |y_i - theta'_i| < delta,
// with g = gamma(state.t) and sigma_i = sigma(omega_i).
NetworkState ia_step(const NetworkState& state, const ConsensusMatrix& p,
                     std::span<const double> y, const GammaSchedule& gamma,
                     const ModelParams& params);

IaRunResult ia_run(std::span<const double> y, const ConsensusMatrix& p,
                   const GammaSchedule& gamma, const ModelParams& params,
                   const StopRule& stop = {});

// Ratio series from a recorded trace; bounded ratios after stabilization_time
// witness the O(gamma(t)) disagreement decay.
ConsensusDiagnostics consensus_diagnostics(const IaRunResult& result);

}  // namespace faultnet
