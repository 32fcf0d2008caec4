#pragma once

#include <complex>
#include <vector>

#include "fragkit/bigfloat.hpp"
#include "fragkit/law.hpp"

namespace fragkit {

// Every function here takes the self-similarity index alpha explicitly: the
// law describes one split, alpha how fast particles of a given size split.

/// gamma(n, beta) = prod_{k<n} psi(beta + alpha k); gamma(0, beta) = 1.
std::complex<double> gamma_n(const ReproductionLaw& law, double alpha, int n, std::complex<double> beta);

struct SeriesOptions {
  double rel_tol = 1e-12;
  mp::Precision start_bits = 128;
  mp::Precision max_bits = 4096;
};

/// m(t, beta) summed in arbitrary precision.
struct SeriesEvaluation {
  std::complex<double> value;
  mp::BigComplex big;  ///< value at working precision
  long working_precision_bits = 0;
  int terms_used = 0;
  double max_term_magnitude = 0.0;
  double cancellation_digits_lost = 0.0;
  /// False when psi could only be evaluated in double precision (no closed
  /// form), so extra working bits cannot buy accuracy in the coefficients.
  bool exact_coefficients = true;
};

/// sum_n (-t)^n gamma(n, beta) / n!. alpha = 0 gives the homogeneous case.
SeriesEvaluation m_series(const ReproductionLaw& law, double alpha, double t, std::complex<double> beta,
                          const SeriesOptions& options = {});

/// Solution of d/dt m(t) = -m(t) + int m(x^alpha t) x^beta sigma(dx) on a
/// uniform grid, by the method of steps.
struct IntegroSolution {
  double step = 0.0;
  std::vector<double> t;
  std::vector<double> m;
  /// Monotone cubic interpolation between grid values.
  double operator()(double time) const;
};

IntegroSolution m_integro(const ReproductionLaw& law, double alpha, double t_max, double beta,
                          double step = 0.005);

struct DerivativeIdentity {
  mp::BigFloat lhs;  ///< k-th t-derivative of m(t, beta), finite differences
  mp::BigFloat rhs;  ///< (-1)^k gamma(k, beta) m(t, beta + k alpha)
  double residual = 0.0;  ///< |lhs - rhs| / max(|rhs|, 1e-300)
};

/// Residual of d^k/dt^k m(t, beta) = (-1)^k gamma(k, beta) m(t, beta + k alpha).
DerivativeIdentity derivative_identity_check(const ReproductionLaw& law, double alpha, double t,
                                             double beta, int k);

struct GammaExtrapolation {
  std::complex<double> z;
  std::complex<double> beta;
  std::complex<double> value;
  int truncation_K = 0;
  double tail_estimate = 0.0;  ///< magnitude of the analytic tail correction in log space
};

/// gamma(z, beta) = prod_{k>=0} psi(beta + alpha k) / psi(beta + alpha (k + z)).
GammaExtrapolation gamma_z(const ReproductionLaw& law, double alpha, std::complex<double> z,
                           std::complex<double> beta, double tol = 1e-12);

/// C(beta) with m(t, beta) ~ C(beta) t^((beta* - beta) / alpha).
std::complex<double> asymptotic_coefficient(const ReproductionLaw& law, double alpha,
                                            std::complex<double> beta);

struct RhoMoments {
  double alpha = 0.0;
  double beta_star = 0.0;
  std::vector<double> moments;  ///< moments[k-1] = int x^(alpha k) rho(dx)
};

/// int x^(alpha k) rho(dx) = (k-1)! / (alpha psi'(beta*)) prod_{j<k} 1 / psi(beta* + alpha j).
double rho_moment(const ReproductionLaw& law, double alpha, int k);
RhoMoments rho_moments(const ReproductionLaw& law, double alpha, int k_max);

/// Gamma-type limit density alpha / Gamma(lambda/alpha) x^(lambda-1) exp(-x^alpha).
double filippov_rho_density(double lambda, double theta, double alpha, double x);
double filippov_rho_cdf(double lambda, double alpha, double x);

/// All p roots of phi(beta) = 1 for a Dirichlet polynomial, decreasing; the
/// first is beta*.
std::vector<double> dirichlet_roots(const ReproductionLaw& law);

/// Gamma-product form of C(beta) for Dirichlet polynomials (alpha = 1).
double hypergeometric_coefficient(const ReproductionLaw& law, double beta);

/// Integer moment int x^k rho(dx) from the Pochhammer formula (alpha = 1).
double hypergeometric_integer_moment(const ReproductionLaw& law, int k);

/// exp(-t psi(beta)), the alpha = 0 mean power sum.
double homogeneous_m(const ReproductionLaw& law, double t, double beta);

struct YMomentRow {
  int k = 0;
  double y_moment = 0.0;    ///< from the tilted exponent psi_hat
  double rho_moment = 0.0;  ///< from psi directly
  double rel_diff = 0.0;
};

/// Compares E Y^k built from psi_hat(z) = psi(z + beta*) with rho_moment(k).
std::vector<YMomentRow> y_moments_consistency(const ReproductionLaw& law, double alpha, int k_max);

/// E sum_j X_j(t)^beta* exp(-t^(1/alpha) X_j(t)), i.e. the exact finite-t
/// mean of int exp(-x) against the weighted empirical measure, from
/// sum_k (-t^(1/alpha))^k / k! m(t, beta* + k) in arbitrary precision.
double mean_weighted_exponential(const ReproductionLaw& law, double alpha, double t);

}  // namespace fragkit
