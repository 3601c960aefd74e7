#include "faultnet/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "internal/accumulate.hpp"

namespace faultnet {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct TermConstants {
  double log_alpha_term;  // log(1-p) - log(alpha) - log(2*pi)/2
  double log_beta_term;   // log(p) - log(beta) - log(2*pi)/2
  double half_inv_a2;
  double half_inv_b2;
};

TermConstants term_constants(const ModelParams& params) {
  return {
      std::log1p(-params.p()) - std::log(params.alpha()) - 0.5 * kLog2Pi,
      std::log(params.p()) - std::log(params.beta()) - 0.5 * kLog2Pi,
      0.5 * params.inv_var_alpha(),
      0.5 * params.inv_var_beta(),
  };
}

// Sorted prefix-sum view of the data, shared by the segment sweep.
struct SortedData {
  std::vector<double> ys;      // ascending copy of y
  std::vector<double> prefix;  // prefix[i] = sum of ys[0..i)
  double total = 0.0;
  double mean = 0.0;
};

SortedData sort_data(std::span<const double> y) {
  SortedData d;
  d.ys.assign(y.begin(), y.end());
  std::sort(d.ys.begin(), d.ys.end());
  d.prefix.resize(d.ys.size() + 1, 0.0);
  for (std::size_t i = 0; i < d.ys.size(); ++i) {
    d.prefix[i + 1] = d.prefix[i] + d.ys[i];
  }
  internal::CompensatedSum tot;
  for (double v : d.ys) tot.add(v);
  d.total = tot.value();
  d.mean = d.total / static_cast<double>(d.ys.size());
  return d;
}

// Ascending breakpoints {y_i - delta, y_i + delta} with exact duplicates merged.
std::vector<double> merged_breakpoints(const SortedData& d, double delta,
                                       bool* merged_any) {
  std::vector<double> b;
  b.reserve(2 * d.ys.size());
  for (double v : d.ys) b.push_back(v - delta);
  for (double v : d.ys) b.push_back(v + delta);
  std::sort(b.begin(), b.end());
  const auto last = std::unique(b.begin(), b.end());
  *merged_any = last != b.end();
  b.erase(last, b.end());
  return b;
}

// Active range [lo_idx, hi_idx) of sorted indices with |ys - rep| < delta.
std::pair<std::size_t, std::size_t> active_range(const SortedData& d, double rep,
                                                 double delta) {
  const auto lo = std::upper_bound(d.ys.begin(), d.ys.end(), rep - delta);
  const auto hi = std::lower_bound(d.ys.begin(), d.ys.end(), rep + delta);
  return {static_cast<std::size_t>(lo - d.ys.begin()),
          static_cast<std::size_t>(std::max(hi, lo) - d.ys.begin())};
}

// Stationary candidate of the quadratic piece with the given active range,
// first from prefix sums, then (near acceptance) refined with compensated sums.
double candidate_estimate(const SortedData& d, std::size_t lo, std::size_t hi,
                          const ModelParams& params) {
  const double dk = params.inv_var_alpha() - params.inv_var_beta();
  const double n = static_cast<double>(d.ys.size());
  const double active_sum = d.prefix[hi] - d.prefix[lo];
  const double active_count = static_cast<double>(hi - lo);
  return (d.total * params.inv_var_beta() + dk * active_sum) /
         (n * params.inv_var_beta() + dk * active_count);
}

double candidate_refined(const SortedData& d, std::size_t lo, std::size_t hi,
                         const ModelParams& params) {
  internal::CompensatedSum num;
  internal::CompensatedSum den;
  for (std::size_t i = 0; i < d.ys.size(); ++i) {
    const double w =
        i >= lo && i < hi ? params.inv_var_alpha() : params.inv_var_beta();
    num.add(w * d.ys[i]);
    den.add(w);
  }
  return num.value() / den.value();
}

// Profile derivative of the piece with active range [lo, hi), evaluated at theta.
double piece_derivative(const SortedData& d, std::size_t lo, std::size_t hi,
                        double theta, const ModelParams& params) {
  const double dk = params.inv_var_alpha() - params.inv_var_beta();
  const double n = static_cast<double>(d.ys.size());
  const double active_sum = d.prefix[hi] - d.prefix[lo];
  const double active_count = static_cast<double>(hi - lo);
  return dk * (active_sum - active_count * theta) / n +
         params.inv_var_beta() * (d.mean - theta);
}

}  // namespace

double log_likelihood(double theta, std::span<const Label> omega,
                      std::span<const double> y, const ModelParams& params) {
  if (omega.size() != y.size()) {
    throw ParameterError("log_likelihood: omega and y sizes differ");
  }
  if (y.empty()) throw ParameterError("log_likelihood: empty input");
  const TermConstants c = term_constants(params);
  internal::CompensatedSum acc;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double r = y[j] - theta;
    if (omega[j] == Label::kAlpha) {
      acc.add(c.log_alpha_term - c.half_inv_a2 * r * r);
    } else {
      acc.add(c.log_beta_term - c.half_inv_b2 * r * r);
    }
  }
  return acc.value() / static_cast<double>(y.size());
}

double profile_value(double theta, std::span<const double> y,
                     const ModelParams& params) {
  if (y.empty()) throw ParameterError("profile_value: empty input");
  const double delta = params.delta();
  const TermConstants c = term_constants(params);
  internal::CompensatedSum acc;
  for (double v : y) {
    const double r = v - theta;
    if (std::fabs(r) < delta) {
      acc.add(c.log_alpha_term - c.half_inv_a2 * r * r);
    } else {
      acc.add(c.log_beta_term - c.half_inv_b2 * r * r);
    }
  }
  return acc.value() / static_cast<double>(y.size());
}

double profile_derivative(double theta, std::span<const double> y,
                          const ModelParams& params) {
  if (y.empty()) throw ParameterError("profile_derivative: empty input");
  const double delta = params.delta();
  const double dk = params.inv_var_alpha() - params.inv_var_beta();
  internal::CompensatedSum active_residual;
  internal::CompensatedSum residual;
  for (double v : y) {
    const double r = v - theta;
    const double ar = std::fabs(r);
    if (ar == delta) {
      throw NonDifferentiablePointError(
          "profile_derivative: theta lies on a classification breakpoint");
    }
    if (ar < delta) active_residual.add(r);
    residual.add(r);
  }
  const double n = static_cast<double>(y.size());
  return dk * active_residual.value() / n +
         params.inv_var_beta() * residual.value() / n;
}

std::vector<ProfileSegment> profile_segments(std::span<const double> y,
                                             const ModelParams& params) {
  if (y.empty()) throw ParameterError("profile_segments: empty input");
  const double delta = params.delta();
  bool merged = false;
  const SortedData d = sort_data(y);
  const std::vector<double> bp = merged_breakpoints(d, delta, &merged);

  std::vector<ProfileSegment> segments;
  segments.reserve(bp.size() + 1);
  for (std::size_t k = 0; k <= bp.size(); ++k) {
    ProfileSegment seg;
    seg.lo = k == 0 ? -kInf : bp[k - 1];
    seg.hi = k == bp.size() ? kInf : bp[k];
    const double rep = k == 0            ? bp.front() - 1.0
                       : k == bp.size()  ? bp.back() + 1.0
                                         : 0.5 * (seg.lo + seg.hi);
    if (rep <= seg.lo || rep >= seg.hi) continue;  // vanishing-width interval
    for (std::uint32_t i = 0; i < y.size(); ++i) {
      if (std::fabs(y[i] - rep) < delta) seg.active.push_back(i);
    }
    // Candidate from the original-order labels; strict interiority required.
    internal::CompensatedSum num;
    internal::CompensatedSum den;
    std::size_t a = 0;
    for (std::uint32_t i = 0; i < y.size(); ++i) {
      const bool is_active = a < seg.active.size() && seg.active[a] == i;
      if (is_active) ++a;
      const double w = is_active ? params.inv_var_alpha() : params.inv_var_beta();
      num.add(w * y[i]);
      den.add(w);
    }
    const double cand = num.value() / den.value();
    if (cand > seg.lo && cand < seg.hi) seg.candidate = cand;
    segments.push_back(std::move(seg));
  }
  return segments;
}

StationarySet enumerate_stationary(std::span<const double> y,
                                   const ModelParams& params) {
  if (y.empty()) throw ParameterError("enumerate_stationary: empty input");
  const double delta = params.delta();
  StationarySet out;
  const SortedData d = sort_data(y);
  const std::vector<double> bp =
      merged_breakpoints(d, delta, &out.degenerate_breakpoints);
  const double scale =
      std::max({1.0, std::fabs(bp.front()), std::fabs(bp.back())});

  std::vector<std::pair<std::size_t, std::size_t>> ranges(bp.size() + 1);
  for (std::size_t k = 0; k <= bp.size(); ++k) {
    const double lo = k == 0 ? -kInf : bp[k - 1];
    const double hi = k == bp.size() ? kInf : bp[k];
    const double rep = k == 0            ? bp.front() - 1.0
                       : k == bp.size()  ? bp.back() + 1.0
                                         : 0.5 * (lo + hi);
    if (rep <= lo || rep >= hi) {  // adjacent representable breakpoints
      out.degenerate_breakpoints = true;
      ranges[k] = k > 0 ? ranges[k - 1] : std::pair<std::size_t, std::size_t>{0, 0};
      continue;
    }
    ranges[k] = active_range(d, rep, delta);
    const auto [alo, ahi] = ranges[k];
    const double estimate = candidate_estimate(d, alo, ahi, params);
    if (estimate <= lo - 1e-6 * scale || estimate >= hi + 1e-6 * scale) continue;
    const double cand = candidate_refined(d, alo, ahi, params);
    if (cand > lo && cand < hi) {
      out.points.push_back(cand);
      out.values.push_back(profile_value(cand, y, params));
    }
  }

  // Diagnostic sweep: a breakpoint is a local max only if the one-sided
  // derivatives bracket zero.
  for (std::size_t k = 0; k < bp.size(); ++k) {
    const auto [llo, lhi] = ranges[k];
    const auto [rlo, rhi] = ranges[k + 1];
    const double dl = piece_derivative(d, llo, lhi, bp[k], params);
    const double dr = piece_derivative(d, rlo, rhi, bp[k], params);
    if (dl >= 0.0 && dr <= 0.0) out.breakpoint_maxima.push_back(bp[k]);
  }

  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (out.values[i] > out.values[out.argmax]) out.argmax = i;
  }
  return out;
}

MlSolution ml_solution(std::span<const double> y, const ModelParams& params) {
  const StationarySet s = enumerate_stationary(y, params);
  double best_theta;
  double best_value;
  if (!s.points.empty()) {
    best_theta = s.points[s.argmax];
    best_value = s.values[s.argmax];
  } else {
    // Degenerate data (coincident breakpoints everywhere): fall back to the
    // finite candidate set of kink locations plus the plain mean.
    bool merged = false;
    const SortedData d = sort_data(y);
    std::vector<double> cands = merged_breakpoints(d, params.delta(), &merged);
    cands.push_back(d.mean);
    best_theta = cands.front();
    best_value = -kInf;
    for (double c : cands) {
      const double v = profile_value(c, y, params);
      if (v > best_value || (v == best_value && c < best_theta)) {
        best_theta = c;
        best_value = v;
      }
    }
  }
  MlSolution ml;
  ml.theta = best_theta;
  ml.value = best_value;
  ml.omega = classify(best_theta, y, params.delta());
  return ml;
}

}  // namespace faultnet
