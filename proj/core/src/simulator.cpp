#include "fragkit/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "fragkit/error.hpp"

namespace fragkit {

namespace {

struct Particle {
  double death;
  double size;
  std::uint64_t key;
};

// min-heap on death time; the key breaks ties so pop order is a pure
// function of the particles, not of insertion history
bool later(const Particle& a, const Particle& b) {
  if (a.death != b.death) return a.death > b.death;
  return a.key > b.key;
}

double lifetime(double size, double alpha, std::uint64_t key) {
  Stream clock(key, Stream::Purpose::lifetime);
  const double e = clock.exponential();
  return alpha == 0.0 ? e : e * std::pow(size, -alpha);
}

double stick_floor(const ReproductionLaw& law) {
  if (const auto* p = std::get_if<StickBreakingLossy>(&law.parameters())) return p->child_floor;
  if (const auto* p = std::get_if<StickBreakingConservative>(&law.parameters())) return p->child_floor;
  return 0.0;
}

}  // namespace

RunResult run(const SimulationConfig& config, const ReproductionLaw& law, std::uint64_t replicate) {
  if (!(config.alpha >= 0.0)) throw DomainError("alpha must be >= 0");
  if (!(config.child_floor >= 0.0)) throw DomainError("child floor must be >= 0");
  if (!std::is_sorted(config.snapshot_times.begin(), config.snapshot_times.end())) {
    throw DomainError("snapshot times must be sorted");
  }
  for (double t : config.snapshot_times) {
    if (t < 0.0 || t > config.t_max) throw DomainError("snapshot times must lie in [0, t_max]");
  }
  if (!law.has_sampler()) throw UnsupportedSampler("law '" + law.name() + "' has no sampler");

  const double bstar = law.has_beta_star() ? law.beta_star() : 1.0;
  const double relative_floor = stick_floor(law);
  RunResult result;
  const std::uint64_t root = root_key(config.master_seed, replicate);

  std::vector<Particle> heap;
  heap.push_back({lifetime(1.0, config.alpha, root), 1.0, root});
  double frozen = 0.0;
  double frozen_sup = 0.0;

  for (double t_snap : config.snapshot_times) {
    while (!heap.empty() && heap.front().death <= t_snap) {
      std::pop_heap(heap.begin(), heap.end(), later);
      const Particle parent = heap.back();
      heap.pop_back();
      ++result.splits;

      Stream offspring(parent.key, Stream::Purpose::offspring);
      const OffspringSample sample = sample_offspring(law, offspring);
      if (sample.truncated_beta_mass_bound > 0.0) {
        frozen += sample.truncated_beta_mass_bound * std::pow(parent.size, bstar);
        frozen_sup = std::max(frozen_sup, parent.size * relative_floor);
      }
      for (std::size_t i = 0; i < sample.sizes.size(); ++i) {
        const double size = parent.size * sample.sizes[i];
        if (size <= 0.0) continue;
        if (size < config.child_floor) {
          frozen += std::pow(size, bstar);
          frozen_sup = std::max(frozen_sup, size);
          continue;
        }
        const std::uint64_t key = child_key(parent.key, i);
        heap.push_back({parent.death + lifetime(size, config.alpha, key), size, key});
        std::push_heap(heap.begin(), heap.end(), later);
      }
      if (heap.size() > config.max_particles) {
        result.particle_cap_exceeded = true;
        return result;
      }
    }
    PopulationSnapshot snap;
    snap.t = t_snap;
    snap.sizes.reserve(heap.size());
    for (const auto& p : heap) snap.sizes.push_back(p.size);
    std::sort(snap.sizes.begin(), snap.sizes.end(), std::greater<>());
    snap.frozen_beta_mass_bound = frozen;
    snap.frozen_size_sup = frozen_sup;
    snap.replicate_id = replicate;
    snap.root_key = root;
    result.snapshots.push_back(std::move(snap));
  }
  result.extinct = heap.empty();
  return result;
}

std::vector<RunResult> run_replicates(const SimulationConfig& config, const ReproductionLaw& law,
                                      std::size_t count, unsigned threads) {
  std::vector<RunResult> results(count);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        results[i] = run(config, law, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

PowerSum snapshot_power_sum(const PopulationSnapshot& snapshot, std::complex<double> beta, double beta_star) {
  PowerSum out;
  for (double x : snapshot.sizes) out.value += std::exp(beta * std::log(x));
  if (beta.imag() == 0.0 && beta.real() >= beta_star && snapshot.frozen_beta_mass_bound > 0.0) {
    out.truncation_bound =
        snapshot.frozen_beta_mass_bound * std::pow(snapshot.frozen_size_sup, beta.real() - beta_star);
  }
  return out;
}

double snapshot_power_sum(const PopulationSnapshot& snapshot, double beta) {
  double s = 0.0;
  for (double x : snapshot.sizes) s += std::pow(x, beta);
  return s;
}

}  // namespace fragkit
