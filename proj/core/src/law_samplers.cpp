#include <algorithm>
#include <cmath>
#include <random>

#include "fragkit/error.hpp"
#include "fragkit/law.hpp"

namespace fragkit {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// One draw from the normalised component.
double draw_component(const IntensityComponent& component, Stream& stream) {
  return std::visit(
      Overloaded{
          [&](const PowerDensity& p) -> double {
            const double u = stream.uniform_open_left();
            if (p.lower <= 0.0) return std::pow(u, 1.0 / p.theta);
            if (p.theta == 0.0) return std::exp((1.0 - u) * std::log(p.lower));
            const double lo = std::pow(p.lower, p.theta);
            return std::pow(lo + u * (1.0 - lo), 1.0 / p.theta);
          },
          [&](const BetaDensity& b) -> double {
            std::gamma_distribution<double> ga(b.a, 1.0), gb(b.b, 1.0);
            const double x = ga(stream);
            const double y = gb(stream);
            return x / (x + y);
          },
          [](const LogSingularDensity&) -> double {
            throw UnsupportedSampler("log_singular density has no sampler");
          },
          [](const PointMass& a) { return a.location; },
      },
      component);
}

// Stick-breaking: child j is (1-U_j) prod_{k<j} U_k. We stop once the residual
// R = prod U_k drops below the floor. Every later child is a piece of R, and
// given R the remaining pieces are R times an independent conservative
// stick-breaking, so E[sum over the rest of xi^b | R] = R^b * sum_j (1+b)^-(j+1)
// = R^b / b. At b = 1 this equals R pathwise.
OffspringSample stick_breaking(Stream& stream, double floor, bool keep_first, double beta_star) {
  OffspringSample out;
  double residual = 1.0;
  for (int j = 0; residual >= floor; ++j) {
    const double u = stream.uniform();
    const double child = (1.0 - u) * residual;
    residual *= u;
    if ((j > 0 || keep_first) && child > 0.0) out.sizes.push_back(child);
  }
  if (residual > 0.0) {
    const double b = std::isnan(beta_star) ? 1.0 : beta_star;
    out.truncated_beta_mass_bound = std::pow(residual, b) / b;
  }
  return out;
}

OffspringSample power_mixture(const std::vector<PowerDensity>& terms, Stream& stream) {
  // One draw from the normalised sigma plus Poisson(Lambda - 1) more: the
  // point process then has intensity Lambda * (sigma / Lambda) = sigma.
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& t : terms) {
    total += t.lambda / t.theta;
    cumulative.push_back(total);
  }
  auto draw = [&]() {
    const double v = stream.uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), v);
    const std::size_t idx = std::min<std::size_t>(it - cumulative.begin(), terms.size() - 1);
    return std::pow(stream.uniform_open_left(), 1.0 / terms[idx].theta);
  };
  OffspringSample out;
  const std::uint64_t extra = stream.poisson(std::max(0.0, total - 1.0));
  out.sizes.reserve(extra + 1);
  for (std::uint64_t i = 0; i <= extra; ++i) out.sizes.push_back(draw());
  return out;
}

}  // namespace

OffspringSample sample_offspring(const ReproductionLaw& law, Stream& stream,
                                 std::optional<double> relative_floor) {
  if (!law.has_sampler()) throw UnsupportedSampler("law '" + law.name() + "' has no sampler");
  OffspringSample out = std::visit(
      Overloaded{
          [&](const BinaryUniformConservative&) {
            const double u = stream.uniform();
            OffspringSample s;
            s.sizes = {u, 1.0 - u};
            return s;
          },
          [&](const StickBreakingLossy& p) {
            return stick_breaking(stream, relative_floor.value_or(p.child_floor), false, law.beta_star());
          },
          [&](const StickBreakingConservative& p) {
            return stick_breaking(stream, relative_floor.value_or(p.child_floor), true, law.beta_star());
          },
          [&](const FilippovPower& p) { return power_mixture({{p.lambda, p.theta, 0.0}}, stream); },
          [&](const DirichletPolynomial&) {
            const auto& pf = std::get<PartialFractions>(*law.closed_form());
            return power_mixture(pf.terms, stream);
          },
          [&](const UserAtomic& p) {
            const double v = stream.uniform();
            double acc = 0.0;
            const AtomicOutcome* chosen = &p.outcomes.back();
            for (const auto& o : p.outcomes) {
              acc += o.probability;
              if (v < acc) {
                chosen = &o;
                break;
              }
            }
            OffspringSample s;
            s.sizes = chosen->sizes;
            return s;
          },
          [&](const UserPoisson&) {
            const auto& comps = law.intensity();  // first, then the truncated sigma2
            OffspringSample s;
            s.sizes.push_back(draw_component(comps.front(), stream));
            for (std::size_t c = 1; c < comps.size(); ++c) {
              const std::uint64_t n = stream.poisson(total_mass(comps[c]));
              for (std::uint64_t i = 0; i < n; ++i) s.sizes.push_back(draw_component(comps[c], stream));
            }
            return s;
          },
          [&](const LogSingular&) -> OffspringSample {
            throw UnsupportedSampler("log_singular law has no sampler");
          },
      },
      law.parameters());
  out.sizes.erase(std::remove(out.sizes.begin(), out.sizes.end(), 0.0), out.sizes.end());
  std::sort(out.sizes.begin(), out.sizes.end(), std::greater<>());
  return out;
}

// ---------------------------------------------------------------------------

double PowerSeriesDensity::density(double x) const {
  if (x <= 0.0 || x > 1.0) return 0.0;
  double s = 0.0;
  for (const auto& t : terms) s += t.coefficient * std::pow(x, t.exponent - 1.0);
  return std::max(0.0, s);
}

double PowerSeriesDensity::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  x = std::min(x, 1.0);
  double s = 0.0;
  for (const auto& t : terms) s += t.coefficient * std::pow(x, t.exponent) / t.exponent;
  return std::clamp(s / mass(), 0.0, 1.0);
}

double PowerSeriesDensity::mass() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.coefficient / t.exponent;
  return s;
}

double PowerSeriesDensity::sample(Stream& stream) const {
  double positive = 0.0;
  bool signed_terms = false;
  for (const auto& t : terms) {
    if (t.coefficient > 0.0) positive += t.coefficient / t.exponent;
    else signed_terms = true;
  }
  for (;;) {
    double v = stream.uniform() * positive;
    const Term* pick = nullptr;
    for (const auto& t : terms) {
      if (t.coefficient <= 0.0) continue;
      pick = &t;
      v -= t.coefficient / t.exponent;
      if (v < 0.0) break;
    }
    const double x = std::pow(stream.uniform_open_left(), 1.0 / pick->exponent);
    if (!signed_terms) return x;
    double pos = 0.0;
    for (const auto& t : terms) {
      if (t.coefficient > 0.0) pos += t.coefficient * std::pow(x, t.exponent - 1.0);
    }
    if (stream.uniform() * pos <= density(x)) return x;
  }
}

// ---------------------------------------------------------------------------

TaggedLaw::TaggedLaw(ReproductionLaw law, double beta_star, Representation representation)
    : law_(std::move(law)),
      beta_star_(beta_star),
      psi_hat_prime_(psi_derivative(law_, beta_star)),
      representation_(std::move(representation)) {}

double TaggedLaw::sample_eta(Stream& stream) const {
  return std::visit(Overloaded{
                        [&](const AtomicTilt& a) {
                          double v = stream.uniform();
                          for (const auto& atom : a.atoms) {
                            v -= atom.mass;
                            if (v < 0.0) return atom.location;
                          }
                          return a.atoms.back().location;
                        },
                        [&](const DensityTilt& d) { return d.eta.sample(stream); },
                    },
                    representation_);
}

double TaggedLaw::sample_eta0(Stream& stream) const {
  return std::visit(Overloaded{
                        [&](const AtomicTilt& a) {
                          // mixture over atoms y with weight w_y (-log y), then y^U
                          double total = 0.0;
                          for (const auto& atom : a.atoms) total -= atom.mass * std::log(atom.location);
                          double v = stream.uniform() * total;
                          double y = a.atoms.back().location;
                          for (const auto& atom : a.atoms) {
                            v += atom.mass * std::log(atom.location);
                            if (v < 0.0 && atom.location < 1.0) {
                              y = atom.location;
                              break;
                            }
                          }
                          return std::pow(y, stream.uniform());
                        },
                        [&](const DensityTilt& d) { return d.eta0.sample(stream); },
                    },
                    representation_);
}

double TaggedLaw::cdf(double x) const {
  return std::visit(Overloaded{
                        [&](const AtomicTilt& a) {
                          double s = 0.0;
                          for (const auto& atom : a.atoms) {
                            if (atom.location <= x) s += atom.mass;
                          }
                          return std::min(1.0, s);
                        },
                        [&](const DensityTilt& d) { return d.eta.cdf(x); },
                    },
                    representation_);
}

std::complex<double> TaggedLaw::psi_hat(std::complex<double> z) const {
  return psi(law_, z + beta_star_);
}

double TaggedLaw::psi_hat(double z) const { return psi(law_, z + beta_star_); }

double TaggedLaw::psi_hat_derivative_at_zero() const { return psi_hat_prime_; }

TaggedLaw tilted_tag_law(const ReproductionLaw& law, double beta_star) {
  if (!std::isfinite(beta_star)) throw UnsupportedTilt("tilt needs a finite Malthusian exponent");
  const double slope = psi_derivative(law, beta_star);

  const auto& comps = law.intensity();
  const bool all_atoms = std::all_of(comps.begin(), comps.end(), [](const IntensityComponent& c) {
    return std::holds_alternative<PointMass>(c);
  });
  const bool all_powers = std::all_of(comps.begin(), comps.end(), [](const IntensityComponent& c) {
    const auto* p = std::get_if<PowerDensity>(&c);
    return p && p->lower == 0.0;
  });

  if (all_atoms) {
    TaggedLaw::AtomicTilt tilt;
    for (const auto& c : comps) {
      const auto& a = std::get<PointMass>(c);
      tilt.atoms.push_back({a.location, a.mass * std::pow(a.location, beta_star)});
    }
    return TaggedLaw(law, beta_star, tilt);
  }
  if (all_powers) {
    // sigma_hat: sum lambda_j x^(theta_j + b* - 1); eta0 has the same exponents
    // with coefficients lambda_j / ((theta_j + b*) psi'(b*)).
    TaggedLaw::DensityTilt tilt;
    for (const auto& c : comps) {
      const auto& p = std::get<PowerDensity>(c);
      const double e = p.theta + beta_star;
      tilt.eta.terms.push_back({p.lambda, e});
      tilt.eta0.terms.push_back({p.lambda / (e * slope), e});
    }
    return TaggedLaw(law, beta_star, tilt);
  }
  throw UnsupportedTilt("law '" + law.name() + "' has no tiltable representation");
}

TaggedLaw tilted_tag_law(const ReproductionLaw& law) {
  if (!law.has_beta_star()) throw UnsupportedTilt("law has no Malthusian exponent");
  return tilted_tag_law(law, law.beta_star());
}

}  // namespace fragkit
