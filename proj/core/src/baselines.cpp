#include "faultnet/baselines.hpp"

#include <cmath>

#include "internal/accumulate.hpp"

namespace faultnet {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

double plain_mean(std::span<const double> y) {
  return internal::pairwise_mean(y);
}

// Posterior probability of the nominal class given theta, in log space:
// sigmoid of log((1-p)/p) + log(beta/alpha) - (y-theta)^2/2 * (1/a^2 - 1/b^2).
double responsibility(double y, double theta, const ModelParams& params,
                      double log_prior_ratio) {
  const double r = y - theta;
  const double g = log_prior_ratio -
                   0.5 * r * r * (params.inv_var_alpha() - params.inv_var_beta());
  if (g >= 0.0) return 1.0 / (1.0 + std::exp(-g));
  const double e = std::exp(g);
  return e / (1.0 + e);
}

// Mean observed-data log-likelihood of the two-class mixture at theta.
double mixture_objective(std::span<const double> y, double theta,
                         const ModelParams& params) {
  const double la = std::log1p(-params.p()) - std::log(params.alpha()) - kHalfLog2Pi;
  const double lb = std::log(params.p()) - std::log(params.beta()) - kHalfLog2Pi;
  internal::CompensatedSum total;
  for (double yi : y) {
    const double r = yi - theta;
    const double ta = la - 0.5 * r * r * params.inv_var_alpha();
    const double tb = lb - 0.5 * r * r * params.inv_var_beta();
    const double hi = ta > tb ? ta : tb;
    const double lo = ta > tb ? tb : ta;
    total.add(hi + std::log1p(std::exp(lo - hi)));
  }
  return total.value() / static_cast<double>(y.size());
}

}  // namespace

IterativeResult iml_run(std::span<const double> y, const ModelParams& params,
                        double eps, std::uint64_t max_iter) {
  if (y.empty()) throw ParameterError("iml_run: empty observation vector");
  if (max_iter == 0) throw ParameterError("iml_run: max_iter must be positive");
  const double delta = params.delta();

  IterativeResult result;
  result.omega.assign(y.size(), Label::kAlpha);
  double theta_prev = 0.0;
  for (std::uint64_t it = 1; it <= max_iter; ++it) {
    const double theta = weighted_theta(result.omega, y, params);
    result.theta = theta;
    result.theta_trace.push_back(theta);
    classify_into(theta, y, delta, result.omega);
    result.iterations = it;
    if (it > 1 && std::fabs(theta - theta_prev) < eps) {
      result.converged = true;
      break;
    }
    theta_prev = theta;
  }
  return result;
}

IterativeResult em_run(std::span<const double> y, const ModelParams& params,
                       std::optional<double> theta0, double eps,
                       std::uint64_t max_iter) {
  if (y.empty()) throw ParameterError("em_run: empty observation vector");
  if (max_iter == 0) throw ParameterError("em_run: max_iter must be positive");
  const double log_prior_ratio = std::log1p(-params.p()) - std::log(params.p()) +
                                 std::log(params.beta()) - std::log(params.alpha());

  IterativeResult result;
  result.q.resize(y.size());
  double theta = theta0.value_or(plain_mean(y));
  result.theta = theta;
  result.theta_trace.push_back(theta);
  result.objective_trace.push_back(mixture_objective(y, theta, params));

  for (std::uint64_t it = 1; it <= max_iter; ++it) {
    internal::CompensatedSum num;
    internal::CompensatedSum den;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double q = responsibility(y[i], theta, params, log_prior_ratio);
      result.q[i] = q;
      const double w = q * params.inv_var_alpha() + (1.0 - q) * params.inv_var_beta();
      num.add(y[i] * w);
      den.add(w);
    }
    const double next = num.value() / den.value();
    result.theta_trace.push_back(next);
    result.objective_trace.push_back(mixture_objective(y, next, params));
    result.iterations = it;
    const bool done = std::fabs(next - theta) < eps;
    theta = next;
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.theta = theta;
  // Refresh responsibilities at the final theta; the stored ones lag one step.
  result.omega.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    result.q[i] = responsibility(y[i], theta, params, log_prior_ratio);
    result.omega[i] = result.q[i] > 0.5 ? Label::kAlpha : Label::kBeta;
  }
  return result;
}

}  // namespace faultnet
