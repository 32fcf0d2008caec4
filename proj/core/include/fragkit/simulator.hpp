#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "fragkit/law.hpp"
#include "fragkit/rng.hpp"

namespace fragkit {

struct SimulationConfig {
  double alpha = 1.0;  ///< 0 selects the homogeneous (size-independent) clock
  double t_max = 1.0;
  double child_floor = 1e-9;
  std::size_t max_particles = 10'000'000;
  std::uint64_t master_seed = 1;
  std::vector<double> snapshot_times;  ///< sorted, inside [0, t_max]
};

/// Sizes alive at time t, decreasing.
struct PopulationSnapshot {
  double t = 0.0;
  std::vector<double> sizes;
  /// sum of size^beta* over lineages frozen below the child floor, plus the
  /// conditional-mean bound for children an infinite-child sampler discarded
  double frozen_beta_mass_bound = 0.0;
  /// largest size any frozen or discarded lineage had
  double frozen_size_sup = 0.0;
  std::uint64_t replicate_id = 0;
  std::uint64_t root_key = 0;
};

struct RunResult {
  std::vector<PopulationSnapshot> snapshots;
  bool particle_cap_exceeded = false;  ///< snapshots after the cap are missing
  bool extinct = false;
  std::uint64_t splits = 0;
};

/// One replicate of the fragmentation started from a unit particle.
RunResult run(const SimulationConfig& config, const ReproductionLaw& law, std::uint64_t replicate = 0);

/// Replicates 0..count-1 on `threads` workers. Results are indexed by
/// replicate, so the output does not depend on the thread count.
std::vector<RunResult> run_replicates(const SimulationConfig& config, const ReproductionLaw& law,
                                      std::size_t count, unsigned threads = 1);

struct PowerSum {
  std::complex<double> value;
  /// For real beta >= beta*: frozen mass times (frozen size sup)^(beta - beta*).
  double truncation_bound = 0.0;
};

PowerSum snapshot_power_sum(const PopulationSnapshot& snapshot, std::complex<double> beta,
                            double beta_star);
double snapshot_power_sum(const PopulationSnapshot& snapshot, double beta);

// ---------------------------------------------------------------------------
// Generation-indexed tree.

struct GenerationMartingale {
  std::vector<double> M;       ///< M_n = sum over surviving generation-n nodes of weight
  std::vector<double> pruned;  ///< cumulative weight removed up to generation n
  bool node_cap_exceeded = false;
  /// M_n + pruned_n: a pruned node is replaced by its conditional mean, so
  /// this has mean one for every prune threshold.
  double compensated(std::size_t n) const { return M[n] + pruned[n]; }
};

/// Simulates generations 0..depth of the tree keyed by `key`. Nodes of weight
/// below `prune` are cut and their weight recorded.
GenerationMartingale generation_martingale(const ReproductionLaw& law, double beta_star, int depth,
                                           double prune, std::uint64_t key,
                                           std::size_t max_nodes = 5'000'000);

struct MInfinityMoments {
  double mean = 0.0;
  double mean_se = 0.0;
  double second_moment = 0.0;
  double second_moment_se = 0.0;
  int depth_used = 0;
  bool converged = false;  ///< variance plateau reached before the depth cap
  std::vector<double> variance_by_depth;
};

MInfinityMoments estimate_m_infinity_moments(const ReproductionLaw& law, int max_depth,
                                             std::size_t replicates, double prune,
                                             std::uint64_t master_seed, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Tagged fragment and the exponential functional.

struct TaggedPath {
  std::vector<double> jump_times;  ///< jump_times[0] = 0
  std::vector<double> sizes;       ///< size on [jump_times[i], jump_times[i+1])
  double size_at(double t) const;
};

/// Size process of one tagged fragment: at rate x^alpha the size x is
/// multiplied by an independent eta from the tilted law.
TaggedPath tagged_fragment_path(const TaggedLaw& tagged, double alpha, double t_max, Stream& stream);

struct YSample {
  double value = 0.0;
  double tail_bound = 0.0;  ///< conditional mean of the discarded terms
};

/// Y = sum_k e_k prod_{j<=k} eta_j^alpha with eta_0 from the stationary law.
YSample sample_Y(const TaggedLaw& tagged, double alpha, Stream& stream, double eps_tail = 1e-12);

}  // namespace fragkit
