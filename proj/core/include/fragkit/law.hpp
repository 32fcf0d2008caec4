#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fragkit/bigfloat.hpp"
#include "fragkit/rng.hpp"

namespace fragkit {

// ---------------------------------------------------------------------------
// Intensity building blocks. A structural measure sigma on ]0,1] is a finite
// sum of these; every law exposes its sigma this way.

/// Density lambda * x^(theta-1) on ]lower, 1].
struct PowerDensity {
  double lambda = 1.0;
  double theta = 1.0;
  double lower = 0.0;
};

/// mass * Beta(a, b) probability density on ]0, 1[.
struct BetaDensity {
  double mass = 1.0;
  double a = 1.0;
  double b = 1.0;
};

/// c * 1{x < 1/2} * x^(-3/2) * log(x)^(-2); convergence abscissa 1/2,
/// phi(1/2) = c / log 2.
struct LogSingularDensity {
  double c = 0.5;
};

struct PointMass {
  double location = 1.0;
  double mass = 1.0;
};

using IntensityComponent = std::variant<PowerDensity, BetaDensity, LogSingularDensity, PointMass>;

/// Total mass of a component (may be +inf).
double total_mass(const IntensityComponent& component);

/// Density of the continuous part of sum of components at x (atoms ignored).
double continuous_density(const std::vector<IntensityComponent>& components, double x);

// ---------------------------------------------------------------------------
// Law kinds.

struct BinaryUniformConservative {};

/// Children (1-U_j) prod_{k<j} U_k, j >= 1: the piece 1-U_0 is lost.
struct StickBreakingLossy {
  double child_floor = 1e-12;
};

/// Children (1-U_j) prod_{k<j} U_k, j >= 0.
struct StickBreakingConservative {
  double child_floor = 1e-12;
};

/// sigma(dx) = lambda x^(theta-1) dx.
struct FilippovPower {
  double lambda = 2.0;
  double theta = 1.0;
};

/// sigma(dx) = sum_j lambda_j x^(theta_j - 1) dx, nonnegative on ]0,1].
struct DirichletPolynomial {
  std::vector<PowerDensity> terms;
};

struct AtomicOutcome {
  double probability = 1.0;
  std::vector<double> sizes;
};

/// Finitely many offspring configurations, each drawn with its probability.
struct UserAtomic {
  std::vector<AtomicOutcome> outcomes;
};

/// One child drawn from the probability `first`, plus a Poisson point process
/// with intensity `intensity`.
struct UserPoisson {
  IntensityComponent first;
  std::vector<IntensityComponent> intensity;
  double floor = 0.0;
};

/// Analytics-only law with the log-singular density; it has no Malthusian exponent
/// when c < log 2.
struct LogSingular {
  double c = 0.5;
};

enum class LawKind {
  binary_uniform_conservative,
  stick_breaking_lossy,
  stick_breaking_conservative,
  filippov_power,
  dirichlet_polynomial,
  user_atomic,
  user_poisson,
  log_singular,
};

using LawParameters =
    std::variant<BinaryUniformConservative, StickBreakingLossy, StickBreakingConservative,
                 FilippovPower, DirichletPolynomial, UserAtomic, UserPoisson, LogSingular>;

/// Closed-form Mellin transform descriptors.
struct PartialFractions {
  std::vector<PowerDensity> terms;  ///< phi(b) = sum lambda / (theta + b)
};
struct AtomSum {
  std::vector<PointMass> atoms;  ///< phi(b) = sum mass * location^b
};
struct ExpIntegralForm {
  double c = 0.5;  ///< phi(b) = (c / log 2) E_2((b - 1/2) log 2), real b only
};
using MellinForm = std::variant<PartialFractions, AtomSum, ExpIntegralForm>;

struct AbscissaEstimate {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = -std::numeric_limits<double>::infinity();
};

struct LawOverrides {
  std::optional<bool> arithmetic;
  std::optional<double> convergence_abscissa;
};

/// Offspring sizes of a unit particle, sorted decreasing.
struct OffspringSample {
  std::vector<double> sizes;
  /// For laws with infinitely many children: the conditional mean, given the
  /// residual stick R, of sum xi^beta* over the children discarded below the
  /// floor. Equals R exactly in the conservative case (beta* = 1).
  double truncated_beta_mass_bound = 0.0;
};

/// Immutable reproduction law. Copies share state and are safe to use from
/// several threads at once.
class ReproductionLaw {
 public:
  static ReproductionLaw binary_uniform_conservative();
  static ReproductionLaw stick_breaking_lossy(double child_floor = 1e-12);
  static ReproductionLaw stick_breaking_conservative(double child_floor = 1e-12);
  static ReproductionLaw filippov(double lambda, double theta);
  static ReproductionLaw dirichlet_polynomial(std::vector<PowerDensity> terms);
  static ReproductionLaw user_atomic(std::vector<AtomicOutcome> outcomes);
  static ReproductionLaw user_poisson(IntensityComponent first,
                                      std::vector<IntensityComponent> intensity,
                                      double floor = 0.0);
  static ReproductionLaw log_singular(double c = 0.5);
  static ReproductionLaw from_parameters(LawParameters parameters, LawOverrides overrides = {});

  LawKind kind() const;
  const LawParameters& parameters() const;
  std::string name() const;

  /// beta_a; -inf when phi is entire.
  double convergence_abscissa() const;
  /// True when phi(beta_a) itself is finite.
  bool abscissa_closed() const;
  /// Present when beta_a was estimated by probing rather than known exactly.
  const std::optional<AbscissaEstimate>& abscissa_estimate() const;
  bool arithmetic() const;
  double atom_mass_at_one() const;
  bool conservative() const;
  bool has_sampler() const;

  const std::optional<MellinForm>& closed_form() const;
  const std::vector<IntensityComponent>& intensity() const;
  /// Discarded intensity below the floor (UserPoisson only; may be +inf).
  double discarded_intensity() const;

  /// Cached Malthusian exponent; NaN when none exists.
  double beta_star() const;
  bool has_beta_star() const;

  struct State;  // opaque

 private:
  explicit ReproductionLaw(std::shared_ptr<const State> state);
  std::shared_ptr<const State> state_;
};

// ---------------------------------------------------------------------------
// Mellin transform and friends.

double phi(const ReproductionLaw& law, double beta);
std::complex<double> phi(const ReproductionLaw& law, std::complex<double> beta);
/// Closed-form evaluation in arbitrary precision; nullopt when the law has no
/// closed form valid at complex arguments.
std::optional<mp::BigComplex> phi_big(const ReproductionLaw& law, const mp::BigComplex& beta);
/// d phi / d beta in arbitrary precision, real argument, closed forms only.
std::optional<mp::BigFloat> phi_derivative_big(const ReproductionLaw& law, const mp::BigFloat& beta);

double psi(const ReproductionLaw& law, double beta);
std::complex<double> psi(const ReproductionLaw& law, std::complex<double> beta);
/// psi'(beta): analytic when the closed form allows, otherwise Richardson
/// extrapolated central differences.
double psi_derivative(const ReproductionLaw& law, double beta);

/// Unique real root of phi = 1 to absolute tolerance `tol`.
double malthusian_exponent(const ReproductionLaw& law, double tol = 1e-13);

/// True iff all atom locations are integer powers of a common ratio in ]0,1[.
bool arithmetic_check(const std::vector<double>& atom_locations, double rel_tol = 1e-9,
                      int max_denominator = 64);

/// Builds a law with one child from `first` (a probability) plus a Poisson
/// process with intensity `intensity`, truncated below `floor` when floor > 0.
ReproductionLaw poisson_reproduction(IntensityComponent first,
                                     std::vector<IntensityComponent> intensity,
                                     double floor = 0.0);

// ---------------------------------------------------------------------------
// Sampling.

/// Draws the offspring of a unit particle. `relative_floor` overrides the
/// law's child floor for infinite-child laws (stick-breaking); other laws
/// ignore it.
OffspringSample sample_offspring(const ReproductionLaw& law, Stream& stream,
                                 std::optional<double> relative_floor = std::nullopt);

/// Signed density sum_j coefficient_j x^(exponent_j - 1) on ]0,1] that is
/// known to be nonnegative.
struct PowerSeriesDensity {
  struct Term {
    double coefficient;
    double exponent;
  };
  std::vector<Term> terms;

  double density(double x) const;
  double cdf(double x) const;
  double mass() const;
  /// Mixture of the positive terms, thinned by density / positive part.
  double sample(Stream& stream) const;
};

/// The beta*-tilted single-fragment law sigma_hat(dx) = x^beta* sigma(dx) and
/// the stationary initial factor eta_0 used by the exponential functional.
class TaggedLaw {
 public:
  struct AtomicTilt {
    std::vector<PointMass> atoms;  ///< location, tilted probability
  };
  struct DensityTilt {
    PowerSeriesDensity eta;
    PowerSeriesDensity eta0;
  };
  using Representation = std::variant<AtomicTilt, DensityTilt>;

  TaggedLaw(ReproductionLaw law, double beta_star, Representation representation);

  double sample_eta(Stream& stream) const;
  /// P(eta0 in dx) = sigma_hat]0,x] dx / (psi_hat'(0) x).
  double sample_eta0(Stream& stream) const;
  /// P(eta <= x).
  double cdf(double x) const;
  std::complex<double> psi_hat(std::complex<double> z) const;
  double psi_hat(double z) const;
  double psi_hat_derivative_at_zero() const;
  double beta_star() const { return beta_star_; }
  const ReproductionLaw& law() const { return law_; }
  const Representation& representation() const { return representation_; }

 private:
  ReproductionLaw law_;
  double beta_star_;
  double psi_hat_prime_;
  Representation representation_;
};

TaggedLaw tilted_tag_law(const ReproductionLaw& law, double beta_star);
TaggedLaw tilted_tag_law(const ReproductionLaw& law);

}  // namespace fragkit
