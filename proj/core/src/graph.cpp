#include "faultnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <ostream>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "faultnet/numeric_text.hpp"
#include "internal/mix.hpp"

namespace faultnet {

namespace {

Topology make_topology(TopologyKind kind, std::size_t n) {
  if (n == 0) throw TopologyError("topology: n must be positive");
  Topology t;
  t.kind = kind;
  t.n = n;
  t.adj.resize(n);
  return t;
}

void add_edge(Topology& t, std::uint32_t i, std::uint32_t j) {
  t.adj[i].push_back(j);
  t.adj[j].push_back(i);
}

void sort_adjacency(Topology& t) {
  for (auto& nbrs : t.adj) std::sort(nbrs.begin(), nbrs.end());
}

}  // namespace

Topology build_complete(std::size_t n) {
  Topology t = make_topology(TopologyKind::kComplete, n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) add_edge(t, i, j);
  }
  sort_adjacency(t);
  return t;
}

Topology build_ring(std::size_t n) {
  if (n < 3) throw TopologyError("ring: need n >= 3");
  Topology t = make_topology(TopologyKind::kRing, n);
  for (std::uint32_t i = 0; i < n; ++i) {
    add_edge(t, i, static_cast<std::uint32_t>((i + 1) % n));
  }
  sort_adjacency(t);
  return t;
}

Topology build_torus(std::size_t rows, std::size_t cols) {
  if (rows < 3 || cols < 3) {
    throw TopologyError("torus: need rows, cols >= 3 (wrap-around edges collide)");
  }
  Topology t = make_topology(TopologyKind::kTorus, rows * cols);
  t.rows = rows;
  t.cols = cols;
  const auto id = [cols](std::size_t r, std::size_t c) {
    return static_cast<std::uint32_t>(r * cols + c);
  };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      add_edge(t, id(r, c), id(r, (c + 1) % cols));
      add_edge(t, id(r, c), id((r + 1) % rows, c));
    }
  }
  sort_adjacency(t);
  return t;
}

std::pair<std::size_t, std::size_t> torus_dims(std::size_t n) {
  for (std::size_t r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
       r >= 3; --r) {
    if (n % r == 0 && n / r >= 3) return {r, n / r};
  }
  throw TopologyError("torus: no factorization rows*cols = n with rows, cols >= 3");
}

Topology build_rgg(std::size_t n, double radius, std::uint64_t seed,
                   std::uint32_t max_attempts) {
  if (!(radius > 0.0)) throw TopologyError("rgg: radius must be positive");
  if (max_attempts == 0) throw TopologyError("rgg: max_attempts must be positive");
  const double r2 = radius * radius;
  for (std::uint32_t attempt = 0; attempt < max_attempts; ++attempt) {
    Topology t = make_topology(TopologyKind::kRgg, n);
    t.radius = radius;
    t.seed = seed;
    t.attempts = attempt + 1;
    std::mt19937_64 rng(internal::mix(seed, attempt));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> px(n), py(n);
    for (std::size_t i = 0; i < n; ++i) {
      px[i] = unif(rng);
      py[i] = unif(rng);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = i + 1; j < n; ++j) {
        const double dx = px[i] - px[j];
        const double dy = py[i] - py[j];
        if (dx * dx + dy * dy < r2) add_edge(t, i, j);
      }
    }
    sort_adjacency(t);
    if (is_connected(t)) return t;
  }
  throw TopologyError("rgg: no connected instance within max_attempts");
}

bool is_connected(const Topology& topology) {
  if (topology.n == 0) return false;
  std::vector<char> seen(topology.n, 0);
  std::deque<std::uint32_t> queue{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const std::uint32_t u = queue.front();
    queue.pop_front();
    for (std::uint32_t v : topology.adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        queue.push_back(v);
      }
    }
  }
  return reached == topology.n;
}

std::string topology_tag(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kComplete: return "complete";
    case TopologyKind::kRing: return "ring";
    case TopologyKind::kTorus: return "torus";
    case TopologyKind::kRgg: return "rgg";
  }
  throw ParameterError("topology_tag: unknown kind");
}

// ---- ConsensusMatrix ----

namespace {

// Irreducible (pattern-connected) plus aperiodic. For a symmetric nonnegative
// matrix aperiodicity is exactly: some positive diagonal, or a non-bipartite
// off-diagonal pattern.
bool csr_primitive(std::size_t n, const std::vector<std::size_t>& row_ptr,
                   const std::vector<std::uint32_t>& col,
                   const std::vector<double>& val) {
  if (n == 1) return true;
  bool positive_diag = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col[k] == i && val[k] > 0.0) positive_diag = true;
    }
  }
  // BFS 2-coloring over off-diagonal entries: connectivity + bipartiteness.
  std::vector<int> color(n, -1);
  std::deque<std::uint32_t> queue{0};
  color[0] = 0;
  std::size_t reached = 1;
  bool bipartite = true;
  while (!queue.empty()) {
    const std::uint32_t u = queue.front();
    queue.pop_front();
    for (std::size_t k = row_ptr[u]; k < row_ptr[u + 1]; ++k) {
      const std::uint32_t v = col[k];
      if (v == u || val[k] == 0.0) continue;
      if (color[v] == -1) {
        color[v] = 1 - color[u];
        ++reached;
        queue.push_back(v);
      } else if (color[v] == color[u]) {
        bipartite = false;
      }
    }
  }
  if (reached != n) return false;
  return positive_diag || !bipartite;
}

}  // namespace

void ConsensusMatrix::finalize() {
  if (mean_backed_) {
    primitive_ = n_ == 1 || id_coeff_ < 1.0;
    return;
  }
  primitive_ = csr_primitive(n_, row_ptr_, col_, val_);
}

ConsensusMatrix ConsensusMatrix::identity(std::size_t n) {
  return mean_blend(n, 1.0);
}

ConsensusMatrix ConsensusMatrix::mean_blend(std::size_t n, double id_coeff) {
  if (n == 0) throw ParameterError("consensus matrix: n must be positive");
  if (!(id_coeff >= 0.0 && id_coeff <= 1.0)) {
    throw ParameterError("consensus matrix: id coefficient outside [0,1]");
  }
  ConsensusMatrix m;
  m.n_ = n;
  m.mean_backed_ = true;
  m.id_coeff_ = id_coeff;
  m.finalize();
  return m;
}

ConsensusMatrix ConsensusMatrix::from_triplets(
    std::size_t n,
    std::span<const std::tuple<std::uint32_t, std::uint32_t, double>> entries) {
  if (n == 0) throw ParameterError("consensus matrix: n must be positive");
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> cells;
  for (const auto& [i, j, w] : entries) {
    if (i >= n || j >= n) throw ParameterError("consensus matrix: index out of range");
    if (w < 0.0) throw ParameterError("consensus matrix: negative entry");
    if (!cells.emplace(std::make_pair(i, j), w).second) {
      throw ParameterError("consensus matrix: duplicate entry");
    }
  }
  for (const auto& [ij, w] : cells) {
    const auto it = cells.find({ij.second, ij.first});
    if (it == cells.end() || it->second != w) {
      throw ParameterError("consensus matrix: not symmetric");
    }
  }
  ConsensusMatrix m;
  m.n_ = n;
  m.row_ptr_.assign(n + 1, 0);
  for (const auto& [ij, w] : cells) {
    (void)w;
    ++m.row_ptr_[ij.first + 1];
  }
  for (std::size_t i = 0; i < n; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
  m.col_.resize(cells.size());
  m.val_.resize(cells.size());
  std::size_t k = 0;  // std::map iterates row-major already
  for (const auto& [ij, w] : cells) {
    m.col_[k] = ij.second;
    m.val_[k] = w;
    ++k;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t q = m.row_ptr_[i]; q < m.row_ptr_[i + 1]; ++q) row += m.val_[q];
    if (std::fabs(row - 1.0) > 1e-12) {
      throw ParameterError("consensus matrix: row sums must equal 1");
    }
  }
  m.finalize();
  return m;
}

void ConsensusMatrix::multiply(std::span<const double> x,
                               std::span<double> out) const {
  if (x.size() != n_ || out.size() != n_) {
    throw ParameterError("consensus multiply: size mismatch");
  }
  if (mean_backed_) {
    double total = 0.0;
    for (double v : x) total += v;
    const double mixed = (1.0 - id_coeff_) * total / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = id_coeff_ * x[i] + mixed;
    return;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      acc += val_[k] * x[col_[k]];
    }
    out[i] = acc;
  }
}

double ConsensusMatrix::entry(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw ParameterError("consensus entry: index out of range");
  if (mean_backed_) {
    const double mixed = (1.0 - id_coeff_) / static_cast<double>(n_);
    return i == j ? id_coeff_ + mixed : mixed;
  }
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
    if (col_[k] == j) return val_[k];
  }
  return 0.0;
}

const std::optional<SpectralInfo>& ConsensusMatrix::spectral_info(
    std::size_t spectral_cap) const {
  if (spectral_.has_value() || n_ > spectral_cap) return spectral_;
  SpectralInfo info;
  if (mean_backed_) {
    info.eigenvalues.assign(n_, id_coeff_);
    info.eigenvalues.back() = 1.0;
  } else {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_),
                                                  static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_[k])) =
            val_[k];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense,
                                                          Eigen::EigenvaluesOnly);
    info.eigenvalues.assign(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + n_);
    std::sort(info.eigenvalues.begin(), info.eigenvalues.end());
  }
  info.min_eigenvalue = info.eigenvalues.front();
  info.mu2 = n_ >= 2 ? std::max(std::fabs(info.eigenvalues.front()),
                                std::fabs(info.eigenvalues[n_ - 2]))
                     : 0.0;
  spectral_ = std::move(info);
  return spectral_;
}

void ConsensusMatrix::dump_edge_list(std::ostream& os) const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (mean_backed_) {
      for (std::size_t j = 0; j < n_; ++j) {
        const double w = entry(i, j);
        if (w != 0.0) {
          os << i << ' ' << j << ' ' << to_shortest(w) << '\n';
        }
      }
      continue;
    }
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      os << i << ' ' << col_[k] << ' ' << to_shortest(val_[k]) << '\n';
    }
  }
}

ConsensusMatrix metropolis(const Topology& topology) {
  if (topology.n == 0) throw TopologyError("metropolis: empty topology");
  if (topology.kind == TopologyKind::kComplete) {
    return ConsensusMatrix::mean_blend(topology.n, 0.0);
  }
  const std::size_t n = topology.n;
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> entries;
  entries.reserve(3 * n);
  for (std::uint32_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::uint32_t j : topology.adj[i]) {
      const double w = 1.0 / static_cast<double>(std::max(topology.adj[i].size(),
                                                          topology.adj[j].size()) +
                                                 1);
      entries.emplace_back(i, j, w);
      off += w;
    }
    entries.emplace_back(i, i, 1.0 - off);
  }
  return ConsensusMatrix::from_triplets(n, entries);
}

ConsensusMatrix lazy(const ConsensusMatrix& p, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ParameterError("lazy: tau must be in (0,1]");
  if (p.mean_backed_) {
    // (1-tau)*I + tau*(c*I + (1-c)*J/n) stays in the same family.
    return ConsensusMatrix::mean_blend(p.n_, 1.0 - tau + tau * p.id_coeff_);
  }
  ConsensusMatrix m;
  m.n_ = p.n_;
  m.row_ptr_.assign(p.n_ + 1, 0);
  std::vector<std::uint32_t> col;
  std::vector<double> val;
  col.reserve(p.col_.size() + p.n_);
  val.reserve(p.col_.size() + p.n_);
  for (std::size_t i = 0; i < p.n_; ++i) {
    bool diag_seen = false;
    for (std::size_t k = p.row_ptr_[i]; k < p.row_ptr_[i + 1]; ++k) {
      double w = tau * p.val_[k];
      if (p.col_[k] == static_cast<std::uint32_t>(i)) {
        w += 1.0 - tau;
        diag_seen = true;
      } else if (p.col_[k] > static_cast<std::uint32_t>(i) && !diag_seen) {
        col.push_back(static_cast<std::uint32_t>(i));
        val.push_back(1.0 - tau);
        diag_seen = true;
      }
      col.push_back(p.col_[k]);
      val.push_back(w);
    }
    if (!diag_seen) {
      col.push_back(static_cast<std::uint32_t>(i));
      val.push_back(1.0 - tau);
    }
    m.row_ptr_[i + 1] = col.size();
  }
  m.col_ = std::move(col);
  m.val_ = std::move(val);
  m.finalize();
  return m;
}

HypothesisReport validate_theorem_hypotheses(const ConsensusMatrix& p,
                                             std::size_t spectral_cap) {
  HypothesisReport report;
  const std::size_t n = p.size();
  bool symmetric = true;
  bool stochastic = true;
  for (std::size_t i = 0; i < n && (symmetric || stochastic); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = p.entry(i, j);
      row += w;
      if (w < 0.0) stochastic = false;
      if (std::fabs(w - p.entry(j, i)) > 1e-12) symmetric = false;
    }
    if (std::fabs(row - 1.0) > 1e-12) stochastic = false;
  }
  report.symmetric = symmetric;
  report.stochastic = stochastic;
  report.primitive = p.primitive();
  const auto& spec = p.spectral_info(spectral_cap);
  if (spec.has_value()) {
    report.spectrum_checked = true;
    report.min_eigenvalue = spec->min_eigenvalue;
    report.mu2 = spec->mu2;
    report.positive_spectrum = spec->min_eigenvalue > 1e-12;
    report.nonneg_spectrum = spec->min_eigenvalue >= -1e-12;
  }
  return report;
}

}  // namespace faultnet
