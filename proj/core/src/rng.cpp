#include "fragkit/rng.hpp"

#include <cmath>

namespace fragkit {

double Stream::exponential() noexcept { return -std::log(uniform_open_left()); }

std::uint64_t Stream::poisson(double mean) noexcept {
  std::uint64_t total = 0;
  while (mean > 0.0) {
    const double chunk = mean > 32.0 ? 32.0 : mean;
    mean -= chunk;
    // Inversion: walk the CDF until it exceeds a uniform draw.
    const double u = uniform();
    double p = std::exp(-chunk);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf && k < 1000) {
      ++k;
      p *= chunk / static_cast<double>(k);
      cdf += p;
    }
    total += k;
  }
  return total;
}

std::uint64_t Stream::below(std::uint64_t n) noexcept {
  // Lemire's multiply-shift; the bias is below 2^-64 * n.
  __extension__ using u128 = unsigned __int128;
  const auto wide = static_cast<u128>((*this)()) * n;
  return static_cast<std::uint64_t>(wide >> 64);
}

}  // namespace fragkit
