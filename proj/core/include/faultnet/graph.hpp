#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "faultnet/errors.hpp"

namespace faultnet {

inline constexpr std::size_t kDefaultSpectralCap = 2048;

enum class TopologyKind : std::uint8_t { kComplete, kRing, kTorus, kRgg };

struct Topology {
  TopologyKind kind = TopologyKind::kComplete;
  std::size_t n = 0;
  std::vector<std::vector<std::uint32_t>> adj;  // sorted neighbor lists, no self loops
  std::size_t rows = 0, cols = 0;               // torus only
  double radius = 0.0;                          // rgg only
  std::uint64_t seed = 0;                       // rgg only
  std::uint32_t attempts = 0;                   // rgg connectivity retries used
};

Topology build_complete(std::size_t n);
Topology build_ring(std::size_t n);
Topology build_torus(std::size_t rows, std::size_t cols);
// Uniform points in the unit square, edge iff distance < radius; resampled with
// a derived seed until connected, up to max_attempts.
Topology build_rgg(std::size_t n, double radius, std::uint64_t seed,
                   std::uint32_t max_attempts = 100);

// Most-square factorization rows*cols = n with rows, cols >= 3.
std::pair<std::size_t, std::size_t> torus_dims(std::size_t n);

bool is_connected(const Topology& topology);

// Stable short tag ("complete", "ring", "torus", "rgg") used in seeds and reports.
std::string topology_tag(TopologyKind kind);

struct SpectralInfo {
  std::vector<double> eigenvalues;  // ascending
  double min_eigenvalue;
  double mu2;  // second-largest modulus
};

// Symmetric stochastic consensus weights. Stored sparse; complete-graph and
// lazy-of-complete matrices use an exact (c*I + (1-c)*J/n) fast path.
class ConsensusMatrix {
 public:
  static ConsensusMatrix identity(std::size_t n);
  static ConsensusMatrix mean_blend(std::size_t n, double id_coeff);
  // Validates symmetry, nonnegativity and unit row sums (1e-12).
  static ConsensusMatrix from_triplets(
      std::size_t n,
      std::span<const std::tuple<std::uint32_t, std::uint32_t, double>> entries);

  std::size_t size() const { return n_; }
  void multiply(std::span<const double> x, std::span<double> out) const;
  double entry(std::size_t i, std::size_t j) const;
  bool primitive() const { return primitive_; }

  // Dense symmetric eigensolve; nullopt when size exceeds the cap. Cached.
  const std::optional<SpectralInfo>& spectral_info(
      std::size_t spectral_cap = kDefaultSpectralCap) const;

  // One "i j w" line per stored nonzero, row-major.
  void dump_edge_list(std::ostream& os) const;

 private:
  friend ConsensusMatrix lazy(const ConsensusMatrix&, double);
  ConsensusMatrix() = default;
  void finalize();  // degree checks + primitivity

  std::size_t n_ = 0;
  bool mean_backed_ = false;
  double id_coeff_ = 0.0;  // mean-backed: P = c*I + (1-c)*J/n
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> col_;
  std::vector<double> val_;
  bool primitive_ = false;
  mutable std::optional<SpectralInfo> spectral_;
};

// Metropolis weights: off-diagonal 1/max(deg(i)+1, deg(j)+1), diagonal the
// complement. The complete graph collapses to exactly J/n.
ConsensusMatrix metropolis(const Topology& topology);

// P_tau = (1-tau)*I + tau*P, tau in (0,1].
ConsensusMatrix lazy(const ConsensusMatrix& p, double tau);

struct HypothesisReport {
  bool symmetric = false;
  bool stochastic = false;
  bool primitive = false;
  bool spectrum_checked = false;
  std::optional<double> min_eigenvalue;
  std::optional<double> mu2;
  std::optional<bool> positive_spectrum;  // strict: all eigenvalues > 0
  std::optional<bool> nonneg_spectrum;    // relaxed: all eigenvalues >= -1e-12
};

HypothesisReport validate_theorem_hypotheses(
    const ConsensusMatrix& p, std::size_t spectral_cap = kDefaultSpectralCap);

}  // namespace faultnet
