#include "faultnet/model.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "internal/accumulate.hpp"

namespace faultnet {

namespace {
constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)
}

ModelParams::ModelParams(double theta_star, double alpha, double beta, double p)
    : theta_star_(theta_star), alpha_(alpha), beta_(beta), p_(p) {
  if (!std::isfinite(theta_star) || !std::isfinite(alpha) ||
      !std::isfinite(beta) || !std::isfinite(p)) {
    throw ParameterError("model parameters must be finite");
  }
  if (!(0.0 < alpha && alpha < beta)) {
    throw ParameterError("model parameters require 0 < alpha < beta");
  }
  if (!(0.0 < p && p < 1.0)) {
    throw ParameterError("model parameters require p in (0,1)");
  }
  inv_var_alpha_ = 1.0 / (alpha * alpha);
  inv_var_beta_ = 1.0 / (beta * beta);
  const double arg = (1.0 - p) / p * (beta / alpha);
  delta_ = arg > 1.0
               ? std::sqrt(2.0 * std::log(arg) / (inv_var_alpha_ - inv_var_beta_))
               : std::numeric_limits<double>::quiet_NaN();
}

bool ModelParams::has_threshold() const { return !std::isnan(delta_); }

double ModelParams::delta() const {
  if (!has_threshold()) {
    throw DegenerateThresholdError(
        "classification threshold undefined: ((1-p)/p)*(beta/alpha) <= 1");
  }
  return delta_;
}

double delta_threshold(const ModelParams& params) { return params.delta(); }

Observations generate(const ModelParams& params, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ParameterError("generate: n must be positive");
  Observations obs;
  obs.seed = seed;
  obs.y.resize(n);
  obs.omega_true.resize(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Label w = unif(rng) < params.p() ? Label::kBeta : Label::kAlpha;
    obs.omega_true[i] = w;
    obs.y[i] = params.theta_star() + params.sigma(w) * gauss(rng);
  }
  return obs;
}

double mixture_density(double y, const ModelParams& params) {
  const double za = (y - params.theta_star()) / params.alpha();
  const double zb = (y - params.theta_star()) / params.beta();
  const double fa = kInvSqrt2Pi / params.alpha() * std::exp(-0.5 * za * za);
  const double fb = kInvSqrt2Pi / params.beta() * std::exp(-0.5 * zb * zb);
  return (1.0 - params.p()) * fa + params.p() * fb;
}

void classify_into(double theta, std::span<const double> y, double delta,
                   std::vector<Label>& out) {
  out.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = std::fabs(y[i] - theta) < delta ? Label::kAlpha : Label::kBeta;
  }
}

std::vector<Label> classify(double theta, std::span<const double> y, double delta) {
  std::vector<Label> out;
  classify_into(theta, y, delta, out);
  return out;
}

double weighted_theta(std::span<const Label> omega, std::span<const double> y,
                      const ModelParams& params) {
  if (omega.size() != y.size()) {
    throw ParameterError("weighted_theta: omega and y sizes differ");
  }
  if (y.empty()) throw ParameterError("weighted_theta: empty input");
  internal::CompensatedSum num;
  internal::CompensatedSum den;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double w = params.inv_var(omega[i]);
    num.add(w * y[i]);
    den.add(w);
  }
  return num.value() / den.value();
}

}  // namespace faultnet
