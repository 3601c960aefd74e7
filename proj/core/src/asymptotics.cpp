#include "faultnet/asymptotics.hpp"

#include <cmath>

namespace faultnet {

namespace {

constexpr double kTwoOverSqrtPi = 1.1283791670955125739;
constexpr double kInvSqrtPi = 0.56418958354775628695;
constexpr double kInvSqrt2 = 0.70710678118654752440;

// Maclaurin series of erf, adequate through x = 2 (worst-case cancellation
// there costs ~2 digits, far inside the 1e-12 absolute budget).
double erfc_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x2 / n;
    const double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) <= 1e-17 * std::fabs(sum)) break;
  }
  return 1.0 - kTwoOverSqrtPi * sum;
}

// Modified Lentz evaluation of the classical continued fraction
//   erfc(x) = e^(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + (2/2)/(x + (3/2)/(x + ...))))
// which converges quickly for x > 2.
double erfc_fraction(double x) {
  constexpr double kTiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int n = 1; n < 300; ++n) {
    const double a = 0.5 * n;
    d = x + a * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = x + a / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return kInvSqrtPi * std::exp(-x * x) / f;
}

}  // namespace

double erfc(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) return 2.0 - erfc(-x);
  return x <= 2.0 ? erfc_series(x) : erfc_fraction(x);
}

AsymptoticReport limit_classification_error(const ModelParams& params) {
  const double delta = params.delta();
  const double qa = erfc(delta * kInvSqrt2 / params.alpha());
  const double qb = erfc(delta * kInvSqrt2 / params.beta());
  const double q = (1.0 - params.p()) * qa + params.p() * (1.0 - qb);
  return AsymptoticReport{q, delta, params};
}

}  // namespace faultnet
