#include <algorithm>
#include <cmath>

#include "fragkit/error.hpp"
#include "fragkit/simulator.hpp"

namespace fragkit {

double TaggedPath::size_at(double t) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  if (it == jump_times.begin()) return 1.0;
  return sizes[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

TaggedPath tagged_fragment_path(const TaggedLaw& tagged, double alpha, double t_max, Stream& stream) {
  if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
  TaggedPath path;
  double t = 0.0;
  double x = 1.0;
  path.jump_times.push_back(0.0);
  path.sizes.push_back(1.0);
  for (;;) {
    const double hold = stream.exponential() * (alpha == 0.0 ? 1.0 : std::pow(x, -alpha));
    t += hold;
    if (!(t <= t_max)) break;
    x *= tagged.sample_eta(stream);
    path.jump_times.push_back(t);
    path.sizes.push_back(x);
    if (x == 0.0) break;
  }
  return path;
}

YSample sample_Y(const TaggedLaw& tagged, double alpha, Stream& stream, double eps_tail) {
  if (!(alpha > 0.0)) throw DomainError("the exponential functional needs alpha > 0");
  if (!(eps_tail > 0.0)) throw DomainError("eps_tail must be positive");
  // E eta^alpha = phi(beta* + alpha)
  const double q = 1.0 - tagged.psi_hat(alpha);
  YSample out;
  double product = std::pow(tagged.sample_eta0(stream), alpha);
  for (;;) {
    out.value += stream.exponential() * product;
    if (product < eps_tail) break;
    product *= std::pow(tagged.sample_eta(stream), alpha);
  }
  out.tail_bound = product * q / (1.0 - q);
  return out;
}

}  // namespace fragkit
