#pragma once

// Independent reference implementations used only by tests. Everything here is
// deliberately slow and simple so it cannot share a bug with the library code.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "faultnet/model.hpp"

namespace oracle {

// ---- Adaptive Simpson quadrature ----

template <typename F>
double simpson_slice(const F& f, double a, double b, double fa, double fm,
                     double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_slice(f, a, m, fa, flm, fm);
  const double right = simpson_slice(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol = 1e-14) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fm, fb, simpson_slice(f, a, b, fa, fm, fb),
                          tol, 60);
}

// erfc via quadrature of the defining integral over [x, x+40].
inline double erfc_quadrature(double x) {
  if (x < 0.0) return 2.0 - erfc_quadrature(-x);
  const auto g = [](double t) { return std::exp(-t * t); };
  const double tail = integrate(g, x, x + 40.0, 1e-18);
  return 1.1283791670955125739 * tail;
}

// ---- Finite differences ----

template <typename F>
double central_difference(const F& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// ---- Likelihood references ----

// Mean log-joint for a fixed labeling, evaluated term by term with no shared
// precomputation.
inline double naive_log_likelihood(double theta, std::span<const faultnet::Label> omega,
                                   std::span<const double> y,
                                   const faultnet::ModelParams& params) {
  const double log2pi = 1.8378770664093454836;
  double total = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double s = params.sigma(omega[j]);
    const double prior =
        omega[j] == faultnet::Label::kAlpha ? 1.0 - params.p() : params.p();
    const double r = (y[j] - theta) / s;
    total += std::log(prior) - std::log(s) - 0.5 * log2pi - 0.5 * r * r;
  }
  return total / static_cast<double>(y.size());
}

inline double naive_profile(double theta, std::span<const double> y,
                            const faultnet::ModelParams& params) {
  const std::vector<faultnet::Label> omega =
      faultnet::classify(theta, y, params.delta());
  return naive_log_likelihood(theta, omega, y, params);
}

// Exhaustive maximization over all 2^n labelings: for each labeling the best
// theta is the weighted mean, so the global profile maximum is the best pair.
struct BruteForceMl {
  double theta;
  std::vector<faultnet::Label> omega;
  double value;
};

inline BruteForceMl brute_force_ml(std::span<const double> y,
                                   const faultnet::ModelParams& params) {
  const std::size_t n = y.size();
  if (n > 20) throw std::invalid_argument("brute_force_ml: n too large");
  BruteForceMl best{0.0, {}, -std::numeric_limits<double>::infinity()};
  std::vector<faultnet::Label> omega(n);
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) {
      omega[i] = (mask >> i) & 1 ? faultnet::Label::kBeta : faultnet::Label::kAlpha;
    }
    const double theta = faultnet::weighted_theta(omega, y, params);
    const double value = naive_log_likelihood(theta, omega, y, params);
    if (value > best.value) best = BruteForceMl{theta, omega, value};
  }
  return best;
}

// Stationary points by dense scanning of the profile derivative sign between
// breakpoints. step controls the scan resolution.
inline std::vector<double> scan_stationary(std::span<const double> y,
                                           const faultnet::ModelParams& params,
                                           double step = 1e-4) {
  const double delta = params.delta();
  double lo = y[0], hi = y[0];
  for (double v : y) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  lo -= delta + 1.0;
  hi += delta + 1.0;
  std::vector<double> points;
  double prev_theta = lo;
  double prev_value = naive_profile(lo, y, params);
  for (double t = lo + step; t <= hi; t += step) {
    const double mid_value = naive_profile(t, y, params);
    const double next = t + step;
    const double next_value = naive_profile(next, y, params);
    if (mid_value >= prev_value && mid_value >= next_value &&
        (mid_value > prev_value || mid_value > next_value)) {
      // Refine by golden-section inside [prev_theta, next].
      double a = prev_theta, b = next;
      for (int it = 0; it < 200; ++it) {
        const double m1 = a + 0.381966 * (b - a);
        const double m2 = b - 0.381966 * (b - a);
        if (naive_profile(m1, y, params) < naive_profile(m2, y, params)) {
          a = m1;
        } else {
          b = m2;
        }
      }
      points.push_back(0.5 * (a + b));
    }
    prev_theta = t;
    prev_value = mid_value;
  }
  return points;
}

}  // namespace oracle
