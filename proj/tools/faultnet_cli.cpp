// Command-line front end: single runs, Monte Carlo sweeps, profile-likelihood
// curves, consensus-matrix validation and asymptotic error rates.
//
// Every subcommand accepts --config FILE holding key=value lines (comments
// start with '#'); keys are the long option names without leading dashes.
// Explicit flags override the file. Outputs echo the resolved configuration
// and a 64-bit hash of it, as '#' comment lines in CSV and as "config" /
// "config_hash" fields in JSON.
//
// Exit codes: 0 success, 2 usage or parameter errors, 3 internal failures.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "faultnet/asymptotics.hpp"
#include "faultnet/baselines.hpp"
#include "faultnet/graph.hpp"
#include "faultnet/ia.hpp"
#include "faultnet/likelihood.hpp"
#include "faultnet/model.hpp"
#include "faultnet/montecarlo.hpp"
#include "faultnet/numeric_text.hpp"
#include "internal/mix.hpp"

namespace {

using namespace faultnet;

// Per-run sub-streams, matching the sweep driver: one for the sample draw,
// one for the rgg layout.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kGraphStream = 2;

std::vector<std::string> split_list(const std::string& text, const char* what) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ',')) {
    if (cur.empty()) throw ParameterError(std::string(what) + ": empty list entry");
    out.push_back(cur);
  }
  if (out.empty()) throw ParameterError(std::string(what) + ": empty list");
  return out;
}

double parse_double(const std::string& s, const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParameterError(std::string(what) + ": bad number '" + s + "'");
  }
  if (pos != s.size())
    throw ParameterError(std::string(what) + ": bad number '" + s + "'");
  return v;
}

std::uint64_t parse_size(const std::string& s, const char* what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw ParameterError(std::string(what) + ": bad count '" + s + "'");
  }
  if (pos != s.size())
    throw ParameterError(std::string(what) + ": bad count '" + s + "'");
  return v;
}

TopologyKind parse_topology(const std::string& tag) {
  if (tag == "complete") return TopologyKind::kComplete;
  if (tag == "ring") return TopologyKind::kRing;
  if (tag == "torus") return TopologyKind::kTorus;
  if (tag == "rgg") return TopologyKind::kRgg;
  throw ParameterError("unknown topology '" + tag +
                       "' (want complete|ring|torus|rgg)");
}

// "ia", "ia@0.55", "em", "iml", "ml_exact"; plain "ia" takes default_zeta.
AlgoConfig parse_algo(const std::string& item, double default_zeta) {
  std::string name = item;
  double zeta = default_zeta;
  if (const auto at = item.find('@'); at != std::string::npos) {
    name = item.substr(0, at);
    zeta = parse_double(item.substr(at + 1), "--algo");
    if (name != "ia")
      throw ParameterError("--algo: only ia takes a @zeta suffix, got '" + item + "'");
  }
  if (name == "ia") return {Algorithm::kIa, zeta};
  if (name == "em") return {Algorithm::kEm, zeta};
  if (name == "iml") return {Algorithm::kIml, zeta};
  if (name == "ml_exact") return {Algorithm::kMlExact, zeta};
  throw ParameterError("unknown algorithm '" + name +
                       "' (want ia|em|iml|ml_exact)");
}

// Sorted key=value echo of the options that shape the numbers (file
// destinations excluded), plus an FNV-1a hash over it.
class ConfigEcho {
 public:
  void put(const std::string& key, std::string value) {
    kv_[key] = std::move(value);
  }
  void put(const std::string& key, double v) { kv_[key] = to_shortest(v); }
  void put(const std::string& key, std::uint64_t v) {
    kv_[key] = to_string_u64(v);
  }
  void put_opt(const std::string& key, const std::optional<double>& v) {
    kv_[key] = v ? to_shortest(*v) : std::string("na");
  }

  std::string line() const {
    std::string out;
    for (const auto& [k, v] : kv_) {
      if (!out.empty()) out += ' ';
      out += k;
      out += '=';
      out += v;
    }
    return out;
  }

  std::string hash_hex() const {
    std::string blob;
    for (const auto& [k, v] : kv_) {
      blob += k;
      blob += '=';
      blob += v;
      blob += '\n';
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(internal::fnv1a64(blob)));
    return buf;
  }

  std::string csv_prefix() const {
    return "# config_hash=" + hash_hex() + "\n# config " + line() + "\n";
  }

  nlohmann::json json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : kv_) j[k] = v;
    return j;
  }

 private:
  std::map<std::string, std::string> kv_;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot open output file '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

Topology make_topology(TopologyKind kind, std::size_t n, double radius,
                       std::uint64_t run_seed) {
  switch (kind) {
    case TopologyKind::kComplete:
      return build_complete(n);
    case TopologyKind::kRing:
      return build_ring(n);
    case TopologyKind::kTorus: {
      const auto [rows, cols] = torus_dims(n);
      return build_torus(rows, cols);
    }
    case TopologyKind::kRgg:
      return build_rgg(n, radius, internal::mix(run_seed, kGraphStream));
  }
  throw ParameterError("make_topology: unknown kind");
}

ConsensusMatrix make_matrix(const Topology& t, const std::optional<double>& tau) {
  ConsensusMatrix p = metropolis(t);
  if (tau && *tau != 1.0) return lazy(p, *tau);
  return p;
}

nlohmann::json topology_json(const Topology& t) {
  nlohmann::json j;
  j["kind"] = topology_tag(t.kind);
  j["n"] = t.n;
  if (t.kind == TopologyKind::kTorus) {
    j["rows"] = t.rows;
    j["cols"] = t.cols;
  }
  if (t.kind == TopologyKind::kRgg) {
    j["radius"] = t.radius;
    j["attempts"] = t.attempts;
  }
  return j;
}

nlohmann::json labels_json(std::span<const Label> omega) {
  nlohmann::json j = nlohmann::json::array();
  for (Label w : omega) j.push_back(w == Label::kAlpha ? "alpha" : "beta");
  return j;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  std::string algo = "ia";
  std::uint64_t n = 0;
  std::uint64_t seed = 1;
  std::string topology = "complete";
  double radius = 0.3;
  std::optional<double> tau;
  double zeta = 0.7;
  std::string gamma = "power";
  double gamma_a = 1.0;
  double theta_star = 0.0, alpha = 0.3, beta = 10.0, p = 0.25;
  StopRule stop;
  double eps = 1e-10;
  std::uint64_t max_iter = 10'000;
  std::optional<double> theta0;
  std::string trace_path;
  std::string output;
};

ConfigEcho simulate_echo(const SimulateOpts& o) {
  ConfigEcho e;
  e.put("algo", o.algo);
  e.put("n", o.n);
  e.put("seed", o.seed);
  e.put("topology", o.topology);
  e.put("radius", o.radius);
  e.put_opt("tau", o.tau);
  e.put("zeta", o.zeta);
  e.put("gamma", o.gamma);
  e.put("gamma-a", o.gamma_a);
  e.put("theta-star", o.theta_star);
  e.put("alpha", o.alpha);
  e.put("beta", o.beta);
  e.put("p", o.p);
  e.put("t-max", o.stop.t_max);
  e.put("w-stable", o.stop.w_stable);
  e.put("eps-theta", o.stop.eps_theta);
  e.put("eps-consensus", o.stop.eps_consensus);
  e.put("margin-factor", o.stop.margin_factor);
  e.put("eps", o.eps);
  e.put("max-iter", o.max_iter);
  e.put_opt("theta0", o.theta0);
  return e;
}

GammaSchedule make_schedule(const SimulateOpts& o, double zeta) {
  if (o.gamma == "power") return GammaSchedule::power(zeta);
  if (o.gamma == "log_power") return GammaSchedule::log_power(o.gamma_a);
  throw ParameterError("unknown gamma family '" + o.gamma +
                       "' (want power|log_power)");
}

void run_simulate(const SimulateOpts& o) {
  const ModelParams params{o.theta_star, o.alpha, o.beta, o.p};
  const AlgoConfig algo = parse_algo(o.algo, o.zeta);
  const ConfigEcho echo = simulate_echo(o);
  const std::size_t n = static_cast<std::size_t>(o.n);
  const Observations obs = generate(params, n, internal::mix(o.seed, kDataStream));

  nlohmann::json out;
  out["algo"] = algorithm_tag(algo.kind);
  out["n"] = n;
  out["seed"] = o.seed;

  std::vector<Label> omega_est;
  double theta_est = 0.0;
  std::string trace_text;

  switch (algo.kind) {
    case Algorithm::kIa: {
      const Topology topo =
          make_topology(parse_topology(o.topology), n, o.radius, o.seed);
      const ConsensusMatrix p = make_matrix(topo, o.tau);
      const GammaSchedule g = make_schedule(o, algo.zeta);
      const IaRunResult r = ia_run(obs.y, p, g, params, o.stop);
      out["topology"] = topology_json(topo);
      out["theta"] = r.theta_limit;
      out["theta_bar_final"] = r.theta_bar_final;
      out["fixed_point_residual"] = r.fixed_point_residual;
      out["iterations"] = r.iterations;
      out["stabilization_time"] = r.stabilization_time;
      out["converged"] = r.converged;
      omega_est = r.omega_limit;
      theta_est = r.theta_limit;
      if (!o.trace_path.empty()) {
        std::string rows = "t,gamma,theta_bar,consensus_norm,flips\n";
        for (const IaTracePoint& pt : r.trace) {
          rows += to_string_u64(pt.t);
          rows += ',';
          rows += to_shortest(pt.gamma);
          rows += ',';
          rows += to_shortest(pt.theta_bar);
          rows += ',';
          rows += to_shortest(pt.consensus_norm);
          rows += ',';
          rows += to_string_u64(pt.flips);
          rows += '\n';
        }
        trace_text = echo.csv_prefix() + rows;
      }
      break;
    }
    case Algorithm::kEm:
    case Algorithm::kIml: {
      const IterativeResult r =
          algo.kind == Algorithm::kEm
              ? em_run(obs.y, params, o.theta0, o.eps, o.max_iter)
              : iml_run(obs.y, params, o.eps, o.max_iter);
      out["theta"] = r.theta;
      out["iterations"] = r.iterations;
      out["converged"] = r.converged;
      if (algo.kind == Algorithm::kEm) out["q"] = r.q;
      omega_est = r.omega;
      theta_est = r.theta;
      if (!o.trace_path.empty()) {
        const bool with_objective = algo.kind == Algorithm::kEm;
        std::string rows = with_objective ? "iter,theta,objective\n" : "iter,theta\n";
        for (std::size_t k = 0; k < r.theta_trace.size(); ++k) {
          rows += to_string_u64(k);
          rows += ',';
          rows += to_shortest(r.theta_trace[k]);
          if (with_objective) {
            rows += ',';
            rows += to_shortest(r.objective_trace[k]);
          }
          rows += '\n';
        }
        trace_text = echo.csv_prefix() + rows;
      }
      break;
    }
    case Algorithm::kMlExact: {
      const MlSolution ml = ml_solution(obs.y, params);
      out["theta"] = ml.theta;
      out["value"] = ml.value;
      out["iterations"] = 0;
      out["converged"] = true;
      omega_est = ml.omega;
      theta_est = ml.theta;
      if (!o.trace_path.empty()) trace_text = echo.csv_prefix() + "iter,theta\n";
      break;
    }
  }

  out["theta_error"] = theta_est - params.theta_star();
  out["class_error"] =
      static_cast<double>(hamming_error(omega_est, obs.omega_true)) /
      static_cast<double>(n);
  out["omega"] = labels_json(omega_est);
  out["config"] = echo.json();
  out["config_hash"] = echo.hash_hex();

  if (!o.trace_path.empty()) write_text(o.trace_path, trace_text);
  write_text(o.output, out.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOpts {
  std::string n_list;
  std::string topology_list = "complete";
  std::string algo_list = "ia,em,iml,ml_exact";
  double zeta = 0.7;
  double radius = 0.3;
  std::optional<double> tau;
  std::uint64_t mc_runs = 400;
  std::uint64_t base_seed = 1;
  double theta_star = 0.0, alpha = 0.3, beta = 10.0, p = 0.25;
  StopRule stop;
  double eps = 1e-10;
  std::uint64_t max_iter = 10'000;
  std::uint64_t threads = 0;
  std::string format = "csv";
  std::string output;
};

void run_sweep_cmd(const SweepOpts& o) {
  ExperimentConfig cfg;
  cfg.params = ModelParams{o.theta_star, o.alpha, o.beta, o.p};
  for (const std::string& item : split_list(o.n_list, "--n")) {
    cfg.n_values.push_back(static_cast<std::size_t>(parse_size(item, "--n")));
  }
  for (const std::string& item : split_list(o.topology_list, "--topology")) {
    cfg.topologies.push_back({parse_topology(item), o.radius});
  }
  for (const std::string& item : split_list(o.algo_list, "--algo")) {
    cfg.algorithms.push_back(parse_algo(item, o.zeta));
  }
  cfg.mc_runs = o.mc_runs;
  cfg.base_seed = o.base_seed;
  cfg.tau = o.tau;
  cfg.stop = o.stop;
  cfg.iterative_eps = o.eps;
  cfg.iterative_max_iter = o.max_iter;
  cfg.threads = static_cast<unsigned>(o.threads);

  ConfigEcho echo;
  echo.put("n", o.n_list);
  echo.put("topology", o.topology_list);
  echo.put("algo", o.algo_list);
  echo.put("zeta", o.zeta);
  echo.put("radius", o.radius);
  echo.put_opt("tau", o.tau);
  echo.put("mc-runs", o.mc_runs);
  echo.put("base-seed", o.base_seed);
  echo.put("theta-star", o.theta_star);
  echo.put("alpha", o.alpha);
  echo.put("beta", o.beta);
  echo.put("p", o.p);
  echo.put("t-max", o.stop.t_max);
  echo.put("w-stable", o.stop.w_stable);
  echo.put("eps-theta", o.stop.eps_theta);
  echo.put("eps-consensus", o.stop.eps_consensus);
  echo.put("margin-factor", o.stop.margin_factor);
  echo.put("eps", o.eps);
  echo.put("max-iter", o.max_iter);
  echo.put("format", o.format);

  const SweepReport report = run_sweep(cfg);
  if (o.format == "csv") {
    std::ostringstream os;
    write_csv(report, os);
    write_text(o.output, echo.csv_prefix() + os.str());
  } else if (o.format == "json") {
    nlohmann::json j = nlohmann::json::parse(to_json(report));
    j["config_hash"] = echo.hash_hex();
    write_text(o.output, j.dump(2) + "\n");
  } else {
    throw ParameterError("unknown format '" + o.format + "' (want csv|json)");
  }
}

// ---------------------------------------------------------------------------
// likelihood-curve

struct CurveOpts {
  std::uint64_t n = 0;
  std::uint64_t seed = 1;
  std::uint64_t grid_points = 2001;
  double theta_star = 0.0, alpha = 0.3, beta = 10.0, p = 0.25;
  std::string output;
};

void run_curve(const CurveOpts& o) {
  if (o.grid_points < 2) throw ParameterError("--grid-points must be >= 2");
  const ModelParams params{o.theta_star, o.alpha, o.beta, o.p};
  const std::size_t n = static_cast<std::size_t>(o.n);
  const Observations obs = generate(params, n, internal::mix(o.seed, kDataStream));
  const double delta = params.delta();

  ConfigEcho echo;
  echo.put("n", o.n);
  echo.put("seed", o.seed);
  echo.put("grid-points", o.grid_points);
  echo.put("theta-star", o.theta_star);
  echo.put("alpha", o.alpha);
  echo.put("beta", o.beta);
  echo.put("p", o.p);

  const auto [lo_it, hi_it] = std::minmax_element(obs.y.begin(), obs.y.end());
  const double lo = *lo_it - 2.0 * delta;
  const double hi = *hi_it + 2.0 * delta;

  // Grid plus the exact stationary points, flagged so plots can mark them.
  std::vector<std::pair<double, int>> rows;
  rows.reserve(o.grid_points + 8);
  const double step = (hi - lo) / static_cast<double>(o.grid_points - 1);
  for (std::uint64_t k = 0; k < o.grid_points; ++k) {
    rows.emplace_back(lo + step * static_cast<double>(k), 0);
  }
  const StationarySet s = enumerate_stationary(obs.y, params);
  for (double pt : s.points) rows.emplace_back(pt, 1);
  std::sort(rows.begin(), rows.end());

  std::string text = echo.csv_prefix() + "theta,profile_value,is_stationary\n";
  for (const auto& [theta, flag] : rows) {
    text += to_shortest(theta);
    text += ',';
    text += to_shortest(profile_value(theta, obs.y, params));
    text += ',';
    text += flag ? '1' : '0';
    text += '\n';
  }
  write_text(o.output, text);
}

// ---------------------------------------------------------------------------
// validate-matrix

struct ValidateOpts {
  std::string topology = "complete";
  std::uint64_t n = 0;
  double radius = 0.3;
  std::uint64_t seed = 1;
  std::optional<double> tau;
  std::uint64_t spectral_cap = kDefaultSpectralCap;
  std::string output;
};

void run_validate(const ValidateOpts& o) {
  const std::size_t n = static_cast<std::size_t>(o.n);
  const Topology topo = make_topology(parse_topology(o.topology), n, o.radius, o.seed);
  const ConsensusMatrix p = make_matrix(topo, o.tau);
  const HypothesisReport rep =
      validate_theorem_hypotheses(p, static_cast<std::size_t>(o.spectral_cap));

  ConfigEcho echo;
  echo.put("topology", o.topology);
  echo.put("n", o.n);
  echo.put("radius", o.radius);
  echo.put("seed", o.seed);
  echo.put_opt("tau", o.tau);
  echo.put("spectral-cap", o.spectral_cap);

  nlohmann::json out;
  out["topology"] = topology_json(topo);
  out["symmetric"] = rep.symmetric;
  out["stochastic"] = rep.stochastic;
  out["primitive"] = rep.primitive;
  out["spectrum_checked"] = rep.spectrum_checked;
  if (rep.min_eigenvalue) out["min_eigenvalue"] = *rep.min_eigenvalue;
  if (rep.mu2) out["mu2"] = *rep.mu2;
  if (rep.positive_spectrum) out["positive_spectrum"] = *rep.positive_spectrum;
  if (rep.nonneg_spectrum) out["nonneg_spectrum"] = *rep.nonneg_spectrum;
  out["config"] = echo.json();
  out["config_hash"] = echo.hash_hex();
  write_text(o.output, out.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// asymptotics

struct AsymptoticOpts {
  std::string p_list = "0.05,0.1,0.25,0.5";
  std::string ratio_list = "2,5,10,33.333333333333336,100";
  std::string output;
};

void run_asymptotics(const AsymptoticOpts& o) {
  ConfigEcho echo;
  echo.put("p-values", o.p_list);
  echo.put("ratio-values", o.ratio_list);

  std::string text = echo.csv_prefix() + "p,ratio,delta,q\n";
  for (const std::string& ps : split_list(o.p_list, "--p-values")) {
    const double p = parse_double(ps, "--p-values");
    for (const std::string& rs : split_list(o.ratio_list, "--ratio-values")) {
      const double ratio = parse_double(rs, "--ratio-values");
      const ModelParams params{0.0, 1.0, ratio, p};
      text += to_shortest(p);
      text += ',';
      text += to_shortest(ratio);
      text += ',';
      if (params.has_threshold()) {
        const AsymptoticReport rep = limit_classification_error(params);
        text += to_shortest(rep.delta);
        text += ',';
        text += to_shortest(rep.q_value);
      } else {
        text += "nan,nan";  // no decision threshold at this point
      }
      text += '\n';
    }
  }
  write_text(o.output, text);
}

// ---------------------------------------------------------------------------
// option wiring

CLI::Option* last(CLI::Option* o) {
  o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  return o;
}

template <typename Opts>
void add_model_options(CLI::App* cmd, Opts& o) {
  last(cmd->add_option("--theta-star", o.theta_star, "true parameter value")
           ->capture_default_str());
  last(cmd->add_option("--alpha", o.alpha, "nominal noise deviation")
           ->capture_default_str());
  last(cmd->add_option("--beta", o.beta, "faulty noise deviation")
           ->capture_default_str());
  last(cmd->add_option("--p", o.p, "fault probability")->capture_default_str());
}

void add_stop_options(CLI::App* cmd, StopRule& s) {
  last(cmd->add_option("--t-max", s.t_max, "iteration cap")->capture_default_str());
  last(cmd->add_option("--w-stable", s.w_stable, "label-stability window")
           ->capture_default_str());
  last(cmd->add_option("--eps-theta", s.eps_theta, "estimate movement threshold")
           ->capture_default_str());
  last(cmd->add_option("--eps-consensus", s.eps_consensus,
                       "cross-node spread threshold")
           ->capture_default_str());
  last(cmd->add_option("--margin-factor", s.margin_factor,
                       "label-lock margin fraction; 0 disables the detector")
           ->capture_default_str());
}

std::vector<std::string> load_config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last_ch = line.find_last_not_of(" \t\r");
    line = line.substr(first, last_ch - first + 1);
    if (line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ParameterError("config: expected key=value, got '" + line + "'");
    tokens.push_back("--" + line);
  }
  return tokens;
}

// Pulls --config out of the raw arguments and splices the file's key=value
// pairs in right after the subcommand, so explicit flags parse later and win.
std::vector<std::string> assemble_args(int argc, char** argv) {
  std::vector<std::string> args;
  std::string cfg;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config") {
      if (i + 1 >= argc) throw ParameterError("--config needs a file path");
      cfg = argv[++i];
      continue;
    }
    if (a.rfind("--config=", 0) == 0) {
      cfg = a.substr(9);
      continue;
    }
    args.push_back(a);
  }
  if (!cfg.empty()) {
    if (args.empty() || args[0].empty() || args[0][0] == '-')
      throw ParameterError("--config requires a subcommand");
    const std::vector<std::string> tokens = load_config_tokens(cfg);
    args.insert(args.begin() + 1, tokens.begin(), tokens.end());
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fault-aware distributed estimation toolkit"};
  app.require_subcommand(1);
  app.footer(
      "Each subcommand also accepts --config FILE with key=value lines\n"
      "(long option names without dashes); explicit flags override the file.");

  SimulateOpts sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run one algorithm on one sampled data set");
  last(simulate->add_option("--algo", sim.algo, "ia|em|iml|ml_exact")
           ->capture_default_str());
  last(simulate->add_option("--n", sim.n, "network size")->required());
  last(simulate->add_option("--seed", sim.seed, "run seed")->capture_default_str());
  last(simulate->add_option("--topology", sim.topology,
                            "complete|ring|torus|rgg (ia only)")
           ->capture_default_str());
  last(simulate->add_option("--radius", sim.radius, "rgg connection radius")
           ->capture_default_str());
  last(simulate->add_option("--tau", sim.tau,
                            "extra self-weight: P -> (1-tau)I + tau P"));
  last(simulate->add_option("--zeta", sim.zeta, "power step-size exponent")
           ->capture_default_str());
  last(simulate->add_option("--gamma", sim.gamma, "power|log_power")
           ->capture_default_str());
  last(simulate->add_option("--gamma-a", sim.gamma_a, "log_power exponent")
           ->capture_default_str());
  add_model_options(simulate, sim);
  add_stop_options(simulate, sim.stop);
  last(simulate->add_option("--eps", sim.eps, "em/iml stopping tolerance")
           ->capture_default_str());
  last(simulate->add_option("--max-iter", sim.max_iter, "em/iml iteration cap")
           ->capture_default_str());
  last(simulate->add_option("--theta0", sim.theta0, "em initial estimate"));
  last(simulate->add_option("--trace", sim.trace_path, "write a trace CSV here"));
  last(simulate->add_option("--output", sim.output, "summary JSON path (default stdout)"));
  simulate->callback([&] { run_simulate(sim); });

  SweepOpts sw;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Monte Carlo comparison across sizes, topologies and algorithms");
  last(sweep->add_option("--n", sw.n_list, "comma list of network sizes")
           ->required());
  last(sweep->add_option("--topology", sw.topology_list,
                         "comma list: complete|ring|torus|rgg")
           ->capture_default_str());
  last(sweep->add_option("--algo", sw.algo_list,
                         "comma list: ia[@zeta]|em|iml|ml_exact")
           ->capture_default_str());
  last(sweep->add_option("--zeta", sw.zeta, "default step-size exponent for ia")
           ->capture_default_str());
  last(sweep->add_option("--radius", sw.radius, "rgg connection radius")
           ->capture_default_str());
  last(sweep->add_option("--tau", sw.tau,
                         "extra self-weight: P -> (1-tau)I + tau P"));
  last(sweep->add_option("--mc-runs", sw.mc_runs, "trials per cell")
           ->capture_default_str());
  last(sweep->add_option("--base-seed", sw.base_seed, "seed chain root")
           ->capture_default_str());
  add_model_options(sweep, sw);
  add_stop_options(sweep, sw.stop);
  last(sweep->add_option("--eps", sw.eps, "em/iml stopping tolerance")
           ->capture_default_str());
  last(sweep->add_option("--max-iter", sw.max_iter, "em/iml iteration cap")
           ->capture_default_str());
  last(sweep->add_option("--threads", sw.threads, "trial workers; 0 = hardware")
           ->capture_default_str());
  last(sweep->add_option("--format", sw.format, "csv|json")->capture_default_str());
  last(sweep->add_option("--output", sw.output, "output path (default stdout)"));
  sweep->callback([&] { run_sweep_cmd(sw); });

  CurveOpts curve;
  CLI::App* curve_cmd = app.add_subcommand(
      "likelihood-curve", "profile objective on a grid plus stationary points");
  last(curve_cmd->add_option("--n", curve.n, "network size")->required());
  last(curve_cmd->add_option("--seed", curve.seed, "run seed")->capture_default_str());
  last(curve_cmd->add_option("--grid-points", curve.grid_points, "grid resolution")
           ->capture_default_str());
  add_model_options(curve_cmd, curve);
  last(curve_cmd->add_option("--output", curve.output, "CSV path (default stdout)"));
  curve_cmd->callback([&] { run_curve(curve); });

  ValidateOpts val;
  CLI::App* validate = app.add_subcommand(
      "validate-matrix", "check consensus-weight hypotheses for a topology");
  last(validate->add_option("--topology", val.topology,
                            "complete|ring|torus|rgg")
           ->capture_default_str());
  last(validate->add_option("--n", val.n, "network size")->required());
  last(validate->add_option("--radius", val.radius, "rgg connection radius")
           ->capture_default_str());
  last(validate->add_option("--seed", val.seed, "rgg layout seed")
           ->capture_default_str());
  last(validate->add_option("--tau", val.tau,
                            "extra self-weight: P -> (1-tau)I + tau P"));
  last(validate->add_option("--spectral-cap", val.spectral_cap,
                            "skip the eigensolve above this size")
           ->capture_default_str());
  last(validate->add_option("--output", val.output, "JSON path (default stdout)"));
  validate->callback([&] { run_validate(val); });

  AsymptoticOpts asy;
  CLI::App* asymptotics = app.add_subcommand(
      "asymptotics", "limit classification error over a (p, beta/alpha) grid");
  last(asymptotics->add_option("--p-values", asy.p_list, "comma list of fault rates")
           ->capture_default_str());
  last(asymptotics->add_option("--ratio-values", asy.ratio_list,
                               "comma list of beta/alpha ratios")
           ->capture_default_str());
  last(asymptotics->add_option("--output", asy.output, "CSV path (default stdout)"));
  asymptotics->callback([&] { run_asymptotics(asy); });

  try {
    std::vector<std::string> args = assemble_args(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const TopologyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DegenerateThresholdError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
