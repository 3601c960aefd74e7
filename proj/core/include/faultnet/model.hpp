#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "faultnet/errors.hpp"

namespace faultnet {

// Noise regime of a sensor: nominal (standard deviation alpha) or faulty (beta).
enum class Label : std::uint8_t { kAlpha = 0, kBeta = 1 };

// Measurement model y_i = theta_star + sigma_i * eta_i with eta_i ~ N(0,1) and
// sigma_i = beta with probability p, alpha otherwise.
class ModelParams {
 public:
  ModelParams(double theta_star, double alpha, double beta, double p);

  double theta_star() const { return theta_star_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double p() const { return p_; }

  double sigma(Label w) const { return w == Label::kAlpha ? alpha_ : beta_; }
  double inv_var(Label w) const {
    return w == Label::kAlpha ? inv_var_alpha_ : inv_var_beta_;
  }
  double inv_var_alpha() const { return inv_var_alpha_; }
  double inv_var_beta() const { return inv_var_beta_; }

  // Classification half-width; defined only when ((1-p)/p)*(beta/alpha) > 1.
  bool has_threshold() const;
  double delta() const;  // throws DegenerateThresholdError when undefined

 private:
  double theta_star_;
  double alpha_;
  double beta_;
  double p_;
  double inv_var_alpha_;
  double inv_var_beta_;
  double delta_;  // NaN when undefined
};

struct Observations {
  std::vector<double> y;
  std::vector<Label> omega_true;
  std::uint64_t seed = 0;

  std::size_t size() const { return y.size(); }
};

// Draws n iid samples from the measurement model. Deterministic per seed.
Observations generate(const ModelParams& params, std::size_t n, std::uint64_t seed);

// delta = sqrt( 2*log(((1-p)/p)*(beta/alpha)) / (1/alpha^2 - 1/beta^2) ).
double delta_threshold(const ModelParams& params);

// Marginal density (1-p)*N(theta_star, alpha^2) + p*N(theta_star, beta^2) at y.
double mixture_density(double y, const ModelParams& params);

// Label i alpha iff |y_i - theta| < delta; the tie |y_i - theta| == delta goes to beta.
std::vector<Label> classify(double theta, std::span<const double> y, double delta);
void classify_into(double theta, std::span<const double> y, double delta,
                   std::vector<Label>& out);

// Variance-weighted estimate sum(y_j / sigma_j^2) / sum(1 / sigma_j^2).
double weighted_theta(std::span<const Label> omega, std::span<const double> y,
                      const ModelParams& params);

}  // namespace faultnet
