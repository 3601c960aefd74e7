#pragma once

#include "faultnet/model.hpp"

namespace faultnet {

// Complementary error function, absolute error below 1e-12 on |x| <= 8.
// Implemented here (series + continued fraction) so the value is part of this
// library's contract rather than of the host math library.
double erfc(double x);

struct AsymptoticReport {
  double q_value = 0.0;  // limit relative classification error
  double delta = 0.0;
  ModelParams params;
};

// q(p, alpha, beta) = (1-p) erfc(delta/(alpha sqrt(2)))
//                   + p (1 - erfc(delta/(beta sqrt(2)))).
// Throws DegenerateThresholdError when delta is undefined.
AsymptoticReport limit_classification_error(const ModelParams& params);

}  // namespace faultnet
