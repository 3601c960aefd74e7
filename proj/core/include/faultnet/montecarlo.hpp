#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "faultnet/graph.hpp"
#include "faultnet/ia.hpp"
#include "faultnet/model.hpp"

namespace faultnet {

enum class Algorithm : std::uint8_t { kIa, kEm, kIml, kMlExact };

std::string algorithm_tag(Algorithm a);  // "ia", "em", "iml", "ml_exact"

struct TopologySpec {
  TopologyKind kind = TopologyKind::kComplete;
  double radius = 0.3;  // rgg connection radius
};

struct AlgoConfig {
  Algorithm kind = Algorithm::kIa;
  double zeta = 0.7;  // step-size exponent; read only by the distributed runs
};

struct ExperimentConfig {
  ModelParams params{0.0, 0.3, 10.0, 0.25};
  std::vector<std::size_t> n_values;
  std::vector<TopologySpec> topologies;
  std::vector<AlgoConfig> algorithms;
  std::uint64_t mc_runs = 400;
  std::uint64_t base_seed = 1;
  std::optional<double> tau;  // extra self-weight: P -> (1-tau) I + tau P
  StopRule stop;
  double iterative_eps = 1e-10;       // EM / IML
  std::uint64_t iterative_max_iter = 10'000;
  unsigned threads = 0;  // trial parallelism; 0 = hardware concurrency
};

struct SweepRow {
  std::size_t n = 0;
  TopologyKind topology = TopologyKind::kComplete;
  Algorithm algorithm = Algorithm::kIa;
  std::optional<double> zeta;  // empty for centralized algorithms
  std::uint64_t mc_runs = 0;
  double mean_class_err = 0.0;
  double std_class_err = 0.0;  // sample standard deviation across trials
  double mse_theta = 0.0;
  double mean_iters = 0.0;
  std::uint64_t nonconverged = 0;
};

struct SweepReport {
  ExperimentConfig config;
  std::vector<SweepRow> rows;  // ordered by n, then topology, then algorithm
};

// |{i : a_i != b_i}|; throws ParameterError on length mismatch.
std::size_t hamming_error(std::span<const Label> omega_est,
                          std::span<const Label> omega_true);

// Per-trial seed: a splitmix64 chain over (base_seed, n, topology tag,
// algorithm tag, trial). Independent of execution order and thread count.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t n,
                         TopologyKind topology, Algorithm algorithm,
                         std::uint64_t trial);

// One cell per (n, topology, algorithm): mc_runs independent trials, each
// drawing fresh observations (and a fresh graph for rgg), scoring the relative
// classification error d_H/n and the squared estimate error. Aggregation uses
// pairwise summation over the trial-indexed buffers, so results do not depend
// on the number of worker threads.
SweepReport run_sweep(const ExperimentConfig& config);

// Comma-separated rows with '#' comment lines carrying the configuration.
void write_csv(const SweepReport& report, std::ostream& os);
std::string to_json(const SweepReport& report);

}  // namespace faultnet
