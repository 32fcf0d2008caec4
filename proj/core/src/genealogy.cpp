#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "fragkit/error.hpp"
#include "fragkit/simulator.hpp"

namespace fragkit {

namespace {

struct Node {
  std::uint64_t key;
  double weight;  // size^beta*
};

}  // namespace

GenerationMartingale generation_martingale(const ReproductionLaw& law, double beta_star, int depth,
                                           double prune, std::uint64_t key, std::size_t max_nodes) {
  if (depth < 0) throw DomainError("depth must be >= 0");
  if (!(prune >= 0.0)) throw DomainError("prune threshold must be >= 0");
  if (!(beta_star > 0.0)) throw DomainError("generation martingale needs beta* > 0");

  GenerationMartingale out;
  std::vector<Node> current{{key, 1.0}};
  out.M.push_back(1.0);
  out.pruned.push_back(0.0);
  double pruned = 0.0;

  std::vector<Node> next;
  for (int n = 1; n <= depth; ++n) {
    next.clear();
    for (const Node& parent : current) {
      Stream offspring(parent.key, Stream::Purpose::offspring);
      // Children that would be pruned anyway need not be generated: ask the
      // sampler to stop at the matching relative size.
      std::optional<double> floor;
      if (prune > 0.0) floor = std::clamp(std::pow(prune / parent.weight, 1.0 / beta_star), 1e-300, 0.5);
      const OffspringSample sample = sample_offspring(law, offspring, floor);
      pruned += sample.truncated_beta_mass_bound * parent.weight;
      for (std::size_t i = 0; i < sample.sizes.size(); ++i) {
        const double w = parent.weight * std::pow(sample.sizes[i], beta_star);
        if (w < prune) {
          pruned += w;
          continue;
        }
        next.push_back({child_key(parent.key, i), w});
      }
      if (next.size() > max_nodes) {
        out.node_cap_exceeded = true;
        return out;
      }
    }
    current.swap(next);
    double m = 0.0;
    for (const Node& node : current) m += node.weight;
    out.M.push_back(m);
    out.pruned.push_back(pruned);
  }
  return out;
}

MInfinityMoments estimate_m_infinity_moments(const ReproductionLaw& law, int max_depth, std::size_t replicates,
                                             double prune, std::uint64_t master_seed, unsigned threads) {
  if (!law.has_beta_star()) throw DomainError("law has no Malthusian exponent");
  if (replicates < 2) throw DomainError("need at least two replicates");
  const double bs = law.beta_star();

  // W[r][n], compensated martingale of replicate r at generation n
  std::vector<std::vector<double>> W(replicates);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> capped{false};
  auto worker = [&]() {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= replicates) return;
      const auto gm = generation_martingale(law, bs, max_depth, prune, root_key(master_seed, r));
      if (gm.node_cap_exceeded) capped = true;
      std::vector<double> w(gm.M.size());
      for (std::size_t n = 0; n < w.size(); ++n) w[n] = gm.compensated(n);
      W[r] = std::move(w);
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (capped) throw Error("generation tree exceeded the node cap; raise the prune threshold");

  const double R = static_cast<double>(replicates);
  auto mean_at = [&](int n) {
    double s = 0.0;
    for (const auto& w : W) s += w[n];
    return s / R;
  };

  MInfinityMoments out;
  std::vector<double> means;
  for (int n = 0; n <= max_depth; ++n) {
    means.push_back(mean_at(n));
    double v = 0.0;
    for (const auto& w : W) v += (w[n] - means[n]) * (w[n] - means[n]);
    out.variance_by_depth.push_back(v / (R - 1.0));
  }

  // Plateau: paired difference of squared deviations at n and n-2.
  int depth = max_depth;
  for (int n = 2; n <= max_depth; ++n) {
    double s = 0.0, s2 = 0.0;
    for (const auto& w : W) {
      const double d = (w[n] - means[n]) * (w[n] - means[n]) - (w[n - 2] - means[n - 2]) * (w[n - 2] - means[n - 2]);
      s += d;
      s2 += d * d;
    }
    const double mean_d = s / R;
    const double se = std::sqrt(std::max(0.0, s2 / R - mean_d * mean_d) / (R - 1.0));
    if (std::abs(mean_d) < 2.0 * se || (se == 0.0 && mean_d == 0.0)) {
      depth = n;
      out.converged = true;
      break;
    }
  }
  out.depth_used = depth;

  double s = 0.0, s2 = 0.0, q = 0.0, q2 = 0.0;
  for (const auto& w : W) {
    const double x = w[depth];
    s += x;
    s2 += x * x;
    q += x * x;
    q2 += x * x * x * x;
  }
  out.mean = s / R;
  out.mean_se = std::sqrt(std::max(0.0, s2 / R - out.mean * out.mean) / (R - 1.0));
  out.second_moment = q / R;
  out.second_moment_se = std::sqrt(std::max(0.0, q2 / R - out.second_moment * out.second_moment) / (R - 1.0));
  return out;
}

}  // namespace fragkit
