#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fragkit/analytics.hpp"
#include "fragkit/error.hpp"
#include "fragkit/special.hpp"

namespace fragkit {

namespace {

using cplx = std::complex<double>;

constexpr double kTiny = 1e-13;

bool near_integer(cplx z, long& n) {
  if (z.imag() != 0.0) return false;
  const double r = std::round(z.real());
  if (std::abs(z.real() - r) > 1e-14 * std::max(1.0, std::abs(r))) return false;
  n = static_cast<long>(r);
  return true;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

// Euler-Maclaurin tail of sum_{k>=K} g(k), g(s) = F(s) - F(s+z), with
// F(s) = log psi(beta + alpha s):
//   int_K^inf g = int_K^{K+z} F - z F(inf),
// plus the boundary corrections g/2 - g'/12 + g'''/720.
cplx log_tail(const ReproductionLaw& law, double alpha, cplx z, cplx beta, double K) {
  auto F = [&](cplx s) { return std::log(psi(law, beta + alpha * s)); };
  auto g = [&](double s) { return F(s) - F(s + z); };

  using GL = boost::math::quadrature::gauss<double, 20>;
  const auto& x = GL::abscissa();
  const auto& w = GL::weights();
  cplx integral = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    // map [-1,1] -> [0,1]
    integral += w[i] * (F(K + 0.5 * (1.0 + x[i]) * z) + F(K + 0.5 * (1.0 - x[i]) * z));
  }
  integral *= 0.5 * z;

  const double at_infinity = std::log1p(-law.atom_mass_at_one());
  const double h = 0.5;
  const cplx g0 = g(K);
  const cplx gp1 = g(K + h), gm1 = g(K - h), gp2 = g(K + 2 * h), gm2 = g(K - 2 * h);
  const cplx d1 = (gp1 - gm1) / (2 * h);
  const cplx d3 = (gp2 - 2.0 * gp1 + 2.0 * gm1 - gm2) / (2 * h * h * h);
  return integral - z * at_infinity + 0.5 * g0 - d1 / 12.0 + d3 / 720.0;
}

}  // namespace

GammaExtrapolation gamma_z(const ReproductionLaw& law, double alpha, cplx z, cplx beta, double tol) {
  if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
  GammaExtrapolation out;
  out.z = z;
  out.beta = beta;

  const cplx first = psi(law, beta);
  if (alpha == 0.0) {
    out.value = std::exp(z * std::log(first));
    return out;
  }

  long n = 0;
  if (near_integer(z, n)) {
    if (n >= 0) {
      out.value = gamma_n(law, alpha, static_cast<int>(n), beta);
    } else {
      cplx product = 1.0;
      for (long j = 1; j <= -n; ++j) {
        const cplx f = psi(law, beta - alpha * static_cast<double>(j));
        if (std::abs(f) < kTiny) throw PoleError("z lies in the pole set of gamma(., beta)");
        product *= f;
      }
      out.value = 1.0 / product;
    }
    return out;
  }

  auto numerator = [&](long k) {
    const cplx f = psi(law, beta + alpha * static_cast<double>(k));
    if (std::abs(f) < kTiny) throw DomainError("beta is singular: psi(beta + alpha k) = 0");
    return f;
  };
  auto denominator = [&](long k) {
    const cplx f = psi(law, beta + alpha * (static_cast<double>(k) + z));
    if (std::abs(f) < kTiny) throw PoleError("z lies in the pole set of gamma(., beta)");
    return f;
  };

  long K = 32 + static_cast<long>(4.0 * (std::abs(z) + std::abs(beta) / alpha));
  cplx partial = 0.0;
  long done = 0;
  auto advance = [&](long upto) {
    for (; done < upto; ++done) partial += std::log(numerator(done)) - std::log(denominator(done));
  };
  advance(K);
  cplx tail = log_tail(law, alpha, z, beta, static_cast<double>(K));
  cplx value = std::exp(partial + tail);
  for (int round = 0; round < 14; ++round) {
    const long next = 2 * K;
    advance(next);
    const cplx next_tail = log_tail(law, alpha, z, beta, static_cast<double>(next));
    const cplx next_value = std::exp(partial + next_tail);
    const double change = std::abs(next_value - value);
    K = next;
    tail = next_tail;
    value = next_value;
    if (change <= tol * std::abs(value)) break;
  }
  out.value = value;
  out.truncation_K = static_cast<int>(K);
  out.tail_estimate = std::abs(tail);
  return out;
}

// ---------------------------------------------------------------------------

double rho_moment(const ReproductionLaw& law, double alpha, int k) {
  if (k < 1) throw DomainError("rho moments are indexed from k = 1");
  if (!(alpha > 0.0)) throw DomainError("rho moments need alpha > 0");
  if (!law.has_beta_star()) throw DomainError("law has no Malthusian exponent");
  const double bs = law.beta_star();
  const double slope = psi_derivative(law, bs);
  if (!std::isfinite(slope) || !(slope > 0.0)) throw DomainError("psi'(beta*) is not finite and positive");
  double value = factorial(k - 1) / (alpha * slope);
  for (int j = 1; j < k; ++j) value /= psi(law, bs + alpha * j);
  return value;
}

RhoMoments rho_moments(const ReproductionLaw& law, double alpha, int k_max) {
  RhoMoments out;
  out.alpha = alpha;
  out.beta_star = law.beta_star();
  for (int k = 1; k <= k_max; ++k) out.moments.push_back(rho_moment(law, alpha, k));
  return out;
}

std::complex<double> asymptotic_coefficient(const ReproductionLaw& law, double alpha, cplx beta) {
  if (!(alpha > 0.0)) throw DomainError("asymptotic coefficient needs alpha > 0");
  if (!law.has_beta_star()) throw DomainError("law has no Malthusian exponent");
  if (law.arithmetic()) {
    throw ArithmeticLaw("structural measure is arithmetic: the leading coefficient oscillates");
  }
  const double bs = law.beta_star();
  if (std::abs(beta - bs) < 1e-14 * std::max(1.0, std::abs(bs))) {
    throw PoleError("beta = beta*: m(t, beta*) has no power-law coefficient");
  }
  (void)phi(law, beta);  // domain

  const cplx w = (beta - bs) / alpha;
  long n = 0;
  if (near_integer(w, n)) {
    if (n >= 1) {
      // psi(beta) cancels the last factor of gamma(n, alpha + beta*)
      return rho_moment(law, alpha, static_cast<int>(n));
    }
    // singular beta: m is a polynomial of degree -n in t
    const int degree = static_cast<int>(-n);
    const cplx lead = gamma_n(law, alpha, degree, beta) / factorial(degree);
    return degree % 2 == 0 ? lead : -lead;
  }
  const double slope = psi_derivative(law, bs);
  const cplx g = gamma_z(law, alpha, w, alpha + bs).value;
  return special::gamma(w) * psi(law, beta) / (alpha * slope) / g;
}

double filippov_rho_density(double lambda, double /*theta*/, double alpha, double x) {
  if (x < 0.0) return 0.0;
  if (x == 0.0) return lambda < 1.0 ? std::numeric_limits<double>::infinity() : (lambda == 1.0 ? alpha / std::tgamma(1.0 / alpha) : 0.0);
  const double log_density = std::log(alpha) - std::lgamma(lambda / alpha) + (lambda - 1.0) * std::log(x) -
                             std::pow(x, alpha);
  return std::exp(log_density);
}

double filippov_rho_cdf(double lambda, double alpha, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(lambda / alpha, std::pow(x, alpha));
}

// ---------------------------------------------------------------------------

namespace {

const std::vector<PowerDensity>& partial_fraction_terms(const ReproductionLaw& law) {
  const auto& cf = law.closed_form();
  const auto* pf = cf ? std::get_if<PartialFractions>(&*cf) : nullptr;
  if (!pf) throw DomainError("law is not a Dirichlet polynomial");
  return pf->terms;
}

// coefficients in increasing degree
using Poly = std::vector<double>;

Poly times_linear(const Poly& p, double c) {  // p(x) * (x + c)
  Poly out(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i + 1] += p[i];
    out[i] += c * p[i];
  }
  return out;
}

cplx horner(const Poly& p, cplx x, cplx& derivative) {
  cplx value = 0.0;
  derivative = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) {
    derivative = derivative * x + value;
    value = value * x + p[i];
  }
  return value;
}

}  // namespace

std::vector<double> dirichlet_roots(const ReproductionLaw& law) {
  const auto& terms = partial_fraction_terms(law);
  const std::size_t p = terms.size();
  // prod (b + theta_j) - sum_j lambda_j prod_{i != j} (b + theta_i)
  Poly full{1.0};
  for (const auto& t : terms) full = times_linear(full, t.theta);
  Poly poly = full;
  for (std::size_t j = 0; j < p; ++j) {
    Poly others{1.0};
    for (std::size_t i = 0; i < p; ++i) {
      if (i != j) others = times_linear(others, terms[i].theta);
    }
    for (std::size_t i = 0; i < others.size(); ++i) poly[i] -= terms[j].lambda * others[i];
  }

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < p; ++i) companion(i, p - 1) = -poly[i];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw RootFindingFailure("companion eigenvalues failed");

  std::vector<double> roots;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    cplx r = solver.eigenvalues()[i];
    for (int it = 0; it < 50; ++it) {
      cplx d;
      const cplx v = horner(poly, r, d);
      if (d == 0.0) break;
      const cplx step = v / d;
      r -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(r))) break;
    }
    if (std::abs(r.imag()) > 1e-8 * std::max(1.0, std::abs(r.real()))) {
      throw RootFindingFailure("phi = 1 has non-real roots");
    }
    roots.push_back(r.real());
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  for (std::size_t i = 1; i < roots.size(); ++i) {
    if (roots[i - 1] - roots[i] < 1e-9 * std::max(1.0, std::abs(roots[i]))) {
      throw RootFindingFailure("roots of phi = 1 are not isolated");
    }
  }
  if (law.has_beta_star() && std::abs(roots.front() - law.beta_star()) > 1e-8) {
    throw RootFindingFailure("largest root does not match the Malthusian exponent");
  }
  return roots;
}

double hypergeometric_coefficient(const ReproductionLaw& law, double beta) {
  const auto& terms = partial_fraction_terms(law);
  const auto roots = dirichlet_roots(law);
  const double bs = roots.front();
  cplx log_c = 0.0;
  for (std::size_t j = 1; j < roots.size(); ++j) {
    log_c += special::log_gamma(bs - roots[j]) - special::log_gamma(beta - roots[j]);
  }
  for (const auto& t : terms) {
    log_c += special::log_gamma(beta + t.theta) - special::log_gamma(bs + t.theta);
  }
  return std::exp(log_c).real();
}

double hypergeometric_integer_moment(const ReproductionLaw& law, int k) {
  if (k < 1) throw DomainError("moments are indexed from k = 1");
  const auto& terms = partial_fraction_terms(law);
  const auto roots = dirichlet_roots(law);
  const double bs = roots.front();
  double slope = 0.0;
  for (const auto& t : terms) slope += t.lambda / ((bs + t.theta) * (bs + t.theta));
  double value = factorial(k - 1) / slope;
  for (const auto& t : terms) value *= special::pochhammer(bs + 1.0 + t.theta, k - 1);
  for (double r : roots) value /= special::pochhammer(bs + 1.0 - r, k - 1);
  return value;
}

std::vector<YMomentRow> y_moments_consistency(const ReproductionLaw& law, double alpha, int k_max) {
  if (!law.has_beta_star()) throw DomainError("law has no Malthusian exponent");
  std::optional<TaggedLaw> tilt;
  try {
    tilt.emplace(tilted_tag_law(law));
  } catch (const UnsupportedTilt&) {
  }
  const double bs = law.beta_star();
  auto psi_hat = [&](double z) { return tilt ? tilt->psi_hat(z) : psi(law, z + bs); };
  const double slope = tilt ? tilt->psi_hat_derivative_at_zero() : psi_derivative(law, bs);

  std::vector<YMomentRow> rows;
  double product = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    if (k > 1) product /= psi_hat(alpha * (k - 1));
    YMomentRow row;
    row.k = k;
    row.y_moment = factorial(k - 1) / (alpha * slope) * product;
    row.rho_moment = rho_moment(law, alpha, k);
    row.rel_diff = std::abs(row.y_moment - row.rho_moment) / std::abs(row.rho_moment);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fragkit
