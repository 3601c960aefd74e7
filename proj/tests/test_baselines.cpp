#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "faultnet/baselines.hpp"
#include "faultnet/likelihood.hpp"
#include "faultnet/model.hpp"

using namespace faultnet;

namespace {

const ModelParams kNominal{0.0, 0.3, 10.0, 0.25};

}  // namespace

TEST_CASE("iml splits an antipodal pair and stops in two sweeps") {
  const std::vector<double> y{0.0, 10.0};
  const IterativeResult r = iml_run(y, kNominal);
  CHECK(r.theta == 5.0);
  CHECK(r.omega == std::vector<Label>{Label::kBeta, Label::kBeta});
  CHECK(r.converged);
  CHECK(r.iterations == 2);
  REQUIRE(r.theta_trace.size() == 2);
  CHECK(r.theta_trace[0] == 5.0);
  CHECK(r.theta_trace[1] == 5.0);
  CHECK(r.q.empty());
}

TEST_CASE("iml keeps concordant data nominal") {
  const std::vector<double> y{0.1, -0.2, 0.3, 0.0};
  const IterativeResult r = iml_run(y, kNominal);
  CHECK(r.converged);
  CHECK(r.iterations == 2);
  CHECK(r.omega == std::vector<Label>(4, Label::kAlpha));
  CHECK(r.theta == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("iml with one observation pins theta to it") {
  const std::vector<double> y{2.5};
  const IterativeResult r = iml_run(y, kNominal);
  CHECK(r.theta == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(r.omega == std::vector<Label>{Label::kAlpha});
  CHECK(r.converged);
  CHECK(r.iterations == 2);
}

TEST_CASE("iml respects the iteration cap") {
  const std::vector<double> y{0.0, 10.0};
  const IterativeResult r = iml_run(y, kNominal, 1e-10, 1);
  CHECK(r.iterations == 1);
  CHECK_FALSE(r.converged);
  CHECK(r.theta == 5.0);
}

TEST_CASE("iml terminates quickly on sampled data") {
  for (std::size_t n : {10u, 100u, 1000u}) {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
      const Observations obs = generate(kNominal, n, seed);
      const IterativeResult r = iml_run(obs.y, kNominal);
      CHECK(r.converged);
      CHECK(r.iterations >= 2);
      CHECK(r.iterations <= 10'000);
      const auto [lo, hi] = std::minmax_element(obs.y.begin(), obs.y.end());
      CHECK(r.theta >= *lo);
      CHECK(r.theta <= *hi);
    }
  }
}

TEST_CASE("converged iml estimates are stationary points") {
  int converged = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 4 + static_cast<std::size_t>(seed % 7);
    const Observations obs = generate(kNominal, n, 900 + seed);
    const IterativeResult r = iml_run(obs.y, kNominal);
    if (!r.converged) continue;
    ++converged;
    const StationarySet s = enumerate_stationary(obs.y, kNominal);
    if (s.points.empty()) continue;
    double best = std::numeric_limits<double>::infinity();
    for (double pt : s.points) best = std::min(best, std::fabs(pt - r.theta));
    CHECK(best < 1e-6);
  }
  CHECK(converged >= 15);
}

TEST_CASE("em on identical observations settles immediately") {
  // With zero residual the responsibility is the prior odds times the
  // width ratio: (1-p)/p * beta/alpha = 100, so q = 100/101.
  const std::vector<double> y{1.3, 1.3, 1.3};
  const IterativeResult r = em_run(y, kNominal, 1.3);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.theta == doctest::Approx(1.3).epsilon(1e-12));
  REQUIRE(r.q.size() == 3);
  for (double q : r.q) CHECK(q == doctest::Approx(100.0 / 101.0).epsilon(1e-12));
  CHECK(r.omega == std::vector<Label>(3, Label::kAlpha));
  REQUIRE(r.theta_trace.size() == 2);
  REQUIRE(r.objective_trace.size() == 2);
  CHECK(r.objective_trace[1] >= r.objective_trace[0] - 1e-12);
}

TEST_CASE("em with a vanishing fault prior trusts every node") {
  const ModelParams params{0.0, 0.3, 10.0, 1e-12};
  const std::vector<double> y{0.5, -0.3, 0.2, 0.1};
  const IterativeResult r = em_run(y, params);
  CHECK(r.converged);
  for (double q : r.q) CHECK(q > 1.0 - 1e-9);
  CHECK(r.omega == std::vector<Label>(4, Label::kAlpha));
  CHECK(r.theta == doctest::Approx(0.125).epsilon(1e-9));
}

TEST_CASE("em objective never decreases") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Observations obs = generate(kNominal, 100, seed);
    const IterativeResult r = em_run(obs.y, kNominal);
    REQUIRE(r.converged);
    REQUIRE(r.theta_trace.size() == r.iterations + 1);
    REQUIRE(r.objective_trace.size() == r.iterations + 1);
    for (std::size_t k = 0; k + 1 < r.objective_trace.size(); ++k) {
      CHECK(r.objective_trace[k + 1] >= r.objective_trace[k] - 1e-10);
    }
    const auto [lo, hi] = std::minmax_element(obs.y.begin(), obs.y.end());
    for (double th : r.theta_trace) {
      CHECK(th >= *lo);
      CHECK(th <= *hi);
    }
    for (double q : r.q) {
      CHECK(q >= 0.0);
      CHECK(q <= 1.0);
    }
    CHECK(r.omega.size() == obs.y.size());
  }
}

TEST_CASE("em is bitwise deterministic") {
  const Observations obs = generate(kNominal, 50, 77);
  const IterativeResult a = em_run(obs.y, kNominal);
  const IterativeResult b = em_run(obs.y, kNominal);
  CHECK(a.theta == b.theta);
  CHECK(a.iterations == b.iterations);
  CHECK(a.q == b.q);
  CHECK(a.theta_trace == b.theta_trace);
  CHECK(a.objective_trace == b.objective_trace);
  CHECK(a.omega == b.omega);
}

TEST_CASE("em converges under default settings") {
  const Observations obs = generate(kNominal, 100, 1);
  const IterativeResult r = em_run(obs.y, kNominal);
  CHECK(r.converged);
  CHECK(r.iterations >= 1);
  CHECK(r.iterations < 10'000);
}

TEST_CASE("baseline input validation") {
  const std::vector<double> y{0.0, 1.0};
  CHECK_THROWS_AS(iml_run(std::vector<double>{}, kNominal), ParameterError);
  CHECK_THROWS_AS(em_run(std::vector<double>{}, kNominal), ParameterError);
  CHECK_THROWS_AS(iml_run(y, kNominal, 1e-10, 0), ParameterError);
  CHECK_THROWS_AS(em_run(y, kNominal, std::nullopt, 1e-10, 0), ParameterError);
}
