#include "faultnet/ia.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "internal/accumulate.hpp"

namespace faultnet {

namespace {

constexpr double kGammaFloor = 1e-12;
constexpr double kGammaCeil = 1.0 - 1e-12;
// The label-stability detector is O(n); checking it on every step after the
// stability window would double the cost of long runs for no benefit.
constexpr std::uint64_t kStopCheckStride = 32;
constexpr std::uint64_t kTraceStride = 1024;

bool trace_due(std::uint64_t t) {
  return (t & (t - 1)) == 0 || t % kTraceStride == 0;
}

}  // namespace

GammaSchedule::GammaSchedule(Family family, double param, std::uint64_t t_offset)
    : family_(family), param_(param), t_offset_(t_offset) {
  if (t_offset == 0) throw ParameterError("gamma schedule: t_offset must be >= 1");
}

GammaSchedule GammaSchedule::power(double zeta, std::uint64_t t_offset) {
  if (!(zeta > 0.0 && zeta < 1.0)) {
    throw ParameterError("gamma schedule: zeta must lie in (0,1)");
  }
  return GammaSchedule(Family::kPower, zeta, t_offset);
}

GammaSchedule GammaSchedule::log_power(double a, std::uint64_t t_offset) {
  if (!(a > 0.0)) throw ParameterError("gamma schedule: a must be positive");
  return GammaSchedule(Family::kLogPower, a, t_offset);
}

double GammaSchedule::value(std::uint64_t t) const {
  const double s = static_cast<double>(t + t_offset_);
  const double raw = family_ == Family::kPower
                         ? std::pow(s, -param_)
                         : std::pow(std::log(s), param_) / s;
  return std::clamp(raw, kGammaFloor, kGammaCeil);
}

NetworkState ia_init(std::span<const double> y) {
  if (y.empty()) throw ParameterError("ia_init: empty observation vector");
  NetworkState s;
  s.t = 0;
  s.mu.assign(y.size(), 0.0);
  s.nu.assign(y.size(), 0.0);
  s.theta_hat.assign(y.size(), std::numeric_limits<double>::quiet_NaN());
  s.omega_hat.assign(y.size(), Label::kAlpha);
  return s;
}

namespace {

struct StepScratch {
  std::vector<double> pmu;
  std::vector<double> pnu;
};

// Advances state by one synchronous step; returns the number of label flips.
// Inputs are weighted by the labels held at entry; classification then uses
// the fresh estimates.
std::uint32_t step_in_place(NetworkState& s, const ConsensusMatrix& p,
                            std::span<const double> y, double g, double delta,
                            const ModelParams& params, StepScratch& scratch) {
  const std::size_t n = s.size();
  scratch.pmu.resize(n);
  scratch.pnu.resize(n);
  p.multiply(s.mu, scratch.pmu);
  p.multiply(s.nu, scratch.pnu);
  const double keep = 1.0 - g;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = params.inv_var(s.omega_hat[i]);
    const double mu = keep * scratch.pmu[i] + g * (y[i] * w);
    const double nu = keep * scratch.pnu[i] + g * w;
    s.mu[i] = mu;
    s.nu[i] = nu;
    s.theta_hat[i] = mu / nu;
  }
  std::uint32_t flips = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Label next =
        std::fabs(y[i] - s.theta_hat[i]) < delta ? Label::kAlpha : Label::kBeta;
    flips += next != s.omega_hat[i];
    s.omega_hat[i] = next;
  }
  ++s.t;
  return flips;
}

void check_step_inputs(const NetworkState& s, const ConsensusMatrix& p,
                       std::span<const double> y) {
  const std::size_t n = s.size();
  if (n == 0 || s.nu.size() != n || s.theta_hat.size() != n ||
      s.omega_hat.size() != n) {
    throw ParameterError("ia_step: inconsistent state vectors");
  }
  if (y.size() != n || p.size() != n) {
    throw ParameterError("ia_step: size mismatch between state, y, and matrix");
  }
}

IaTracePoint make_trace_point(const NetworkState& s, double g,
                              std::uint32_t flips) {
  IaTracePoint pt;
  pt.t = s.t;
  pt.gamma = g;
  pt.flips = flips;
  pt.theta_bar = internal::pairwise_mean(s.theta_hat);
  double sq = 0.0;
  for (double th : s.theta_hat) {
    const double d = th - pt.theta_bar;
    sq += d * d;
  }
  pt.consensus_norm = std::sqrt(sq);
  return pt;
}

#ifndef NDEBUG
// nu is a convex combination of inputs in [beta^-2, alpha^-2] except for the
// weight still resting on the zero initial condition. `mass` is accumulated
// additively by the caller; 1 - prod(1 - gamma) cancels badly for tiny gamma.
void assert_state_bounds(const NetworkState& s, double mass,
                         const ModelParams& params, double y_min, double y_max) {
  const double lo = mass * params.inv_var_beta() * (1.0 - 1e-9) - 1e-300;
  const double hi = mass * params.inv_var_alpha() * (1.0 + 1e-9);
  const double slack = 1e-9 * (std::fabs(y_min) + std::fabs(y_max) + 1.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    assert(s.nu[i] >= lo && s.nu[i] <= hi);
    assert(s.theta_hat[i] >= y_min - slack && s.theta_hat[i] <= y_max + slack);
  }
}
#endif

// True when the labels reproduce themselves at their own weighted estimate and
// every node's estimate sits well inside its classification cell, so no
// further step can flip a label under the frozen-label contraction.
bool labels_locked(const NetworkState& s, std::span<const double> y,
                   const ModelParams& params, double delta, double margin_factor,
                   double* theta_lim_out) {
  const double theta_lim = weighted_theta(s.omega_hat, y, params);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = std::fabs(y[i] - theta_lim);
    const Label want = r < delta ? Label::kAlpha : Label::kBeta;
    if (want != s.omega_hat[i]) return false;
    if (!(std::fabs(s.theta_hat[i] - theta_lim) < margin_factor * std::fabs(r - delta))) {
      return false;
    }
  }
  *theta_lim_out = theta_lim;
  return true;
}

}  // namespace

NetworkState ia_step(const NetworkState& state, const ConsensusMatrix& p,
                     std::span<const double> y, const GammaSchedule& gamma,
                     const ModelParams& params) {
  check_step_inputs(state, p, y);
  const double delta = params.delta();
  NetworkState next = state;
  StepScratch scratch;
  step_in_place(next, p, y, gamma.value(state.t), delta, params, scratch);
  return next;
}

IaRunResult ia_run(std::span<const double> y, const ConsensusMatrix& p,
                   const GammaSchedule& gamma, const ModelParams& params,
                   const StopRule& stop) {
  NetworkState s = ia_init(y);
  check_step_inputs(s, p, y);
  if (stop.t_max == 0) throw ParameterError("ia_run: t_max must be positive");
  const double delta = params.delta();
  const std::size_t n = s.size();

  IaRunResult result;
  StepScratch scratch;
  std::vector<double> prev_theta(n, 0.0);
  std::uint64_t stable_count = 0;
  double last_gamma = 0.0;
  std::uint32_t last_flips = 0;
#ifndef NDEBUG
  double deficit = 1.0;
  double mass = 0.0;
  const auto [y_min_it, y_max_it] = std::minmax_element(y.begin(), y.end());
  const double y_min = *y_min_it;
  const double y_max = *y_max_it;
#endif

  while (s.t < stop.t_max) {
    const double g = gamma.value(s.t);
    if (s.t > 0) std::copy(s.theta_hat.begin(), s.theta_hat.end(), prev_theta.begin());
    const std::uint32_t flips = step_in_place(s, p, y, g, delta, params, scratch);
    last_gamma = g;
    last_flips = flips;
#ifndef NDEBUG
    mass += g * deficit;
    deficit *= 1.0 - g;
    assert_state_bounds(s, mass, params, y_min, y_max);
#endif
    if (flips > 0) {
      result.stabilization_time = s.t;
      stable_count = 0;
    } else {
      ++stable_count;
    }
    if (trace_due(s.t)) result.trace.push_back(make_trace_point(s, g, flips));

    if (stable_count >= stop.w_stable && s.t > 1) {
      double max_delta = 0.0;
      double th_min = s.theta_hat[0];
      double th_max = s.theta_hat[0];
      for (std::size_t i = 0; i < n; ++i) {
        max_delta = std::max(max_delta, std::fabs(s.theta_hat[i] - prev_theta[i]));
        th_min = std::min(th_min, s.theta_hat[i]);
        th_max = std::max(th_max, s.theta_hat[i]);
      }
      if (max_delta < stop.eps_theta && th_max - th_min < stop.eps_consensus) {
        result.converged = true;
        break;
      }
      if (s.t % kStopCheckStride == 0) {
        double theta_lim = 0.0;
        if (labels_locked(s, y, params, delta, stop.margin_factor, &theta_lim)) {
          result.converged = true;
          break;
        }
      }
    }
  }

  result.iterations = s.t;
  result.omega_limit = s.omega_hat;
  result.theta_limit = weighted_theta(result.omega_limit, y, params);
  result.theta_bar_final = internal::pairwise_mean(s.theta_hat);
  result.fixed_point_residual =
      std::fabs(result.theta_bar_final - result.theta_limit);
  if (result.trace.empty() || result.trace.back().t != s.t) {
    result.trace.push_back(make_trace_point(s, last_gamma, last_flips));
  }
  return result;
}

ConsensusDiagnostics consensus_diagnostics(const IaRunResult& result) {
  ConsensusDiagnostics diag;
  diag.stabilization_time = result.stabilization_time;
  diag.times.reserve(result.trace.size());
  diag.c_estimates.reserve(result.trace.size());
  for (const auto& pt : result.trace) {
    diag.times.push_back(pt.t);
    diag.c_estimates.push_back(pt.consensus_norm / pt.gamma);
  }
  return diag;
}

}  // namespace faultnet
