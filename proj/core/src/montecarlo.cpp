#include "faultnet/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "faultnet/baselines.hpp"
#include "faultnet/likelihood.hpp"
#include "faultnet/numeric_text.hpp"
#include "internal/accumulate.hpp"
#include "internal/mix.hpp"

namespace faultnet {

namespace {

// Sub-stream selectors hung off the trial seed.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kGraphStream = 2;

struct TrialOutcome {
  double class_err = 0.0;
  double sq_err = 0.0;
  double iters = 0.0;
  bool converged = true;
};

Topology build_topology(const TopologySpec& spec, std::size_t n,
                        std::uint64_t graph_seed) {
  switch (spec.kind) {
    case TopologyKind::kComplete: return build_complete(n);
    case TopologyKind::kRing: return build_ring(n);
    case TopologyKind::kTorus: {
      const auto [rows, cols] = torus_dims(n);
      return build_torus(rows, cols);
    }
    case TopologyKind::kRgg: return build_rgg(n, spec.radius, graph_seed);
  }
  throw ParameterError("build_topology: unknown kind");
}

ConsensusMatrix cell_matrix(const TopologySpec& spec, std::size_t n,
                            std::optional<double> tau, std::uint64_t graph_seed) {
  ConsensusMatrix p = metropolis(build_topology(spec, n, graph_seed));
  if (tau.has_value() && *tau != 1.0) return lazy(p, *tau);
  return p;
}

TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t n,
                       const TopologySpec& topo, const AlgoConfig& algo,
                       const ConsensusMatrix* shared_p, std::uint64_t seed) {
  const Observations obs =
      generate(cfg.params, n, internal::mix(seed, kDataStream));
  TrialOutcome out;
  double theta = 0.0;
  std::size_t mistakes = 0;

  switch (algo.kind) {
    case Algorithm::kIa: {
      const GammaSchedule gamma = GammaSchedule::power(algo.zeta);
      const IaRunResult r =
          shared_p
              ? ia_run(obs.y, *shared_p, gamma, cfg.params, cfg.stop)
              : ia_run(obs.y,
                       cell_matrix(topo, n, cfg.tau,
                                   internal::mix(seed, kGraphStream)),
                       gamma, cfg.params, cfg.stop);
      theta = r.theta_limit;
      mistakes = hamming_error(r.omega_limit, obs.omega_true);
      out.iters = static_cast<double>(r.iterations);
      out.converged = r.converged;
      break;
    }
    case Algorithm::kEm: {
      const IterativeResult r = em_run(obs.y, cfg.params, std::nullopt,
                                       cfg.iterative_eps, cfg.iterative_max_iter);
      theta = r.theta;
      mistakes = hamming_error(r.omega, obs.omega_true);
      out.iters = static_cast<double>(r.iterations);
      out.converged = r.converged;
      break;
    }
    case Algorithm::kIml: {
      const IterativeResult r =
          iml_run(obs.y, cfg.params, cfg.iterative_eps, cfg.iterative_max_iter);
      theta = r.theta;
      mistakes = hamming_error(r.omega, obs.omega_true);
      out.iters = static_cast<double>(r.iterations);
      out.converged = r.converged;
      break;
    }
    case Algorithm::kMlExact: {
      const MlSolution r = ml_solution(obs.y, cfg.params);
      theta = r.theta;
      mistakes = hamming_error(r.omega, obs.omega_true);
      break;
    }
  }

  out.class_err = static_cast<double>(mistakes) / static_cast<double>(n);
  const double err = theta - cfg.params.theta_star();
  out.sq_err = err * err;
  return out;
}

SweepRow aggregate(std::vector<TrialOutcome>& outcomes) {
  const std::size_t m = outcomes.size();
  std::vector<double> buf(m);
  SweepRow row;
  for (std::size_t i = 0; i < m; ++i) buf[i] = outcomes[i].class_err;
  row.mean_class_err = internal::pairwise_mean(buf);
  for (std::size_t i = 0; i < m; ++i) {
    const double d = outcomes[i].class_err - row.mean_class_err;
    buf[i] = d * d;
  }
  row.std_class_err =
      m > 1 ? std::sqrt(internal::pairwise_sum(buf) / static_cast<double>(m - 1))
            : 0.0;
  for (std::size_t i = 0; i < m; ++i) buf[i] = outcomes[i].sq_err;
  row.mse_theta = internal::pairwise_mean(buf);
  for (std::size_t i = 0; i < m; ++i) buf[i] = outcomes[i].iters;
  row.mean_iters = internal::pairwise_mean(buf);
  for (const TrialOutcome& o : outcomes) row.nonconverged += !o.converged;
  return row;
}

}  // namespace

std::string algorithm_tag(Algorithm a) {
  switch (a) {
    case Algorithm::kIa: return "ia";
    case Algorithm::kEm: return "em";
    case Algorithm::kIml: return "iml";
    case Algorithm::kMlExact: return "ml_exact";
  }
  throw ParameterError("algorithm_tag: unknown algorithm");
}

std::size_t hamming_error(std::span<const Label> omega_est,
                          std::span<const Label> omega_true) {
  if (omega_est.size() != omega_true.size()) {
    throw ParameterError("hamming_error: length mismatch");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < omega_est.size(); ++i) {
    count += omega_est[i] != omega_true[i];
  }
  return count;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t n,
                         TopologyKind topology, Algorithm algorithm,
                         std::uint64_t trial) {
  std::uint64_t h = internal::splitmix64(base_seed);
  h = internal::mix(h, n);
  h = internal::mix(h, internal::fnv1a64(topology_tag(topology)));
  h = internal::mix(h, internal::fnv1a64(algorithm_tag(algorithm)));
  return internal::mix(h, trial);
}

SweepReport run_sweep(const ExperimentConfig& config) {
  if (config.mc_runs == 0) throw ParameterError("run_sweep: mc_runs must be >= 1");
  if (config.n_values.empty()) throw ParameterError("run_sweep: no n values");
  if (config.topologies.empty()) throw ParameterError("run_sweep: no topologies");
  if (config.algorithms.empty()) throw ParameterError("run_sweep: no algorithms");

  unsigned threads = config.threads ? config.threads
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::uint64_t>(threads, config.mc_runs));

  SweepReport report{config, {}};
  for (std::size_t n : config.n_values) {
    for (const TopologySpec& topo : config.topologies) {
      for (const AlgoConfig& algo : config.algorithms) {
        // Deterministic graphs are shared across the cell; rgg instances are
        // redrawn inside every trial instead.
        std::optional<ConsensusMatrix> shared;
        if (algo.kind == Algorithm::kIa && topo.kind != TopologyKind::kRgg) {
          shared.emplace(cell_matrix(topo, n, config.tau, 0));
        }
        const ConsensusMatrix* shared_p = shared ? &*shared : nullptr;

        std::vector<TrialOutcome> outcomes(config.mc_runs);
        const auto work = [&](std::uint64_t first, std::uint64_t stride) {
          for (std::uint64_t t = first; t < config.mc_runs; t += stride) {
            const std::uint64_t seed =
                trial_seed(config.base_seed, n, topo.kind, algo.kind, t);
            outcomes[t] = run_trial(config, n, topo, algo, shared_p, seed);
          }
        };
        if (threads <= 1) {
          work(0, 1);
        } else {
          std::vector<std::exception_ptr> errors(threads);
          std::vector<std::thread> pool;
          pool.reserve(threads);
          for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
              try {
                work(w, threads);
              } catch (...) {
                errors[w] = std::current_exception();
              }
            });
          }
          for (auto& th : pool) th.join();
          for (const auto& err : errors) {
            if (err) std::rethrow_exception(err);
          }
        }

        SweepRow row = aggregate(outcomes);
        row.n = n;
        row.topology = topo.kind;
        row.algorithm = algo.kind;
        if (algo.kind == Algorithm::kIa) row.zeta = algo.zeta;
        row.mc_runs = config.mc_runs;
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

namespace {

std::string zeta_text(const std::optional<double>& zeta) {
  return zeta ? to_shortest(*zeta) : std::string("na");
}

}  // namespace

void write_csv(const SweepReport& report, std::ostream& os) {
  const ModelParams& mp = report.config.params;
  os << "# fault-network sweep\n";
  os << "# theta_star=" << to_shortest(mp.theta_star()) << " alpha="
     << to_shortest(mp.alpha()) << " beta=" << to_shortest(mp.beta())
     << " p=" << to_shortest(mp.p()) << '\n';
  os << "# base_seed=" << report.config.base_seed << " tau="
     << (report.config.tau ? to_shortest(*report.config.tau) : std::string("na"))
     << " t_max=" << report.config.stop.t_max << " w_stable="
     << report.config.stop.w_stable << '\n';
  os << "n,topology,algorithm,zeta,mc_runs,mean_class_err,std_class_err,"
        "mse_theta,mean_iters,nonconverged\n";
  for (const SweepRow& row : report.rows) {
    os << row.n << ',' << topology_tag(row.topology) << ','
       << algorithm_tag(row.algorithm) << ',' << zeta_text(row.zeta) << ','
       << row.mc_runs << ',' << to_shortest(row.mean_class_err) << ','
       << to_shortest(row.std_class_err) << ',' << to_shortest(row.mse_theta)
       << ',' << to_shortest(row.mean_iters) << ',' << row.nonconverged << '\n';
  }
}

std::string to_json(const SweepReport& report) {
  nlohmann::json j;
  const ModelParams& mp = report.config.params;
  j["config"] = {
      {"theta_star", mp.theta_star()},
      {"alpha", mp.alpha()},
      {"beta", mp.beta()},
      {"p", mp.p()},
      {"mc_runs", report.config.mc_runs},
      {"base_seed", report.config.base_seed},
      {"iterative_eps", report.config.iterative_eps},
      {"iterative_max_iter", report.config.iterative_max_iter},
      {"t_max", report.config.stop.t_max},
      {"w_stable", report.config.stop.w_stable},
  };
  if (report.config.tau) j["config"]["tau"] = *report.config.tau;
  j["rows"] = nlohmann::json::array();
  for (const SweepRow& row : report.rows) {
    nlohmann::json r = {
        {"n", row.n},
        {"topology", topology_tag(row.topology)},
        {"algorithm", algorithm_tag(row.algorithm)},
        {"mc_runs", row.mc_runs},
        {"mean_class_err", row.mean_class_err},
        {"std_class_err", row.std_class_err},
        {"mse_theta", row.mse_theta},
        {"mean_iters", row.mean_iters},
        {"nonconverged", row.nonconverged},
    };
    if (row.zeta) r["zeta"] = *row.zeta;
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2);
}

}  // namespace faultnet
