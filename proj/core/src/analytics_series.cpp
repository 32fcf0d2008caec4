#include <cmath>

#include "fragkit/analytics.hpp"
#include "fragkit/error.hpp"

namespace fragkit {

namespace {

// psi(beta + alpha k) at a given precision. Closed forms are evaluated in
// MPFR; other laws fall back to double psi.
class PsiLadder {
 public:
  PsiLadder(const ReproductionLaw& law, double alpha, std::complex<double> beta, mp::Precision bits)
      : law_(law), alpha_(alpha), beta_(beta), bits_(bits), big_beta_(beta, bits) {
    exact_ = static_cast<bool>(phi_big(law_, big_beta_));
  }

  bool exact() const { return exact_; }

  mp::BigComplex operator()(long k) const {
    if (exact_) {
      mp::BigComplex arg = big_beta_;
      arg.re += mp::BigFloat(alpha_, bits_) * mp::BigFloat(static_cast<double>(k), bits_);
      mp::BigComplex value = *phi_big(law_, arg);
      return 1.0 - value;
    }
    return mp::BigComplex(psi(law_, beta_ + alpha_ * static_cast<double>(k)), bits_);
  }

 private:
  const ReproductionLaw& law_;
  double alpha_;
  std::complex<double> beta_;
  mp::Precision bits_;
  mp::BigComplex big_beta_;
  bool exact_ = true;
};

struct RawSum {
  mp::BigComplex value;
  int terms = 0;
  mp::BigFloat max_term;
  bool exact = true;
};

RawSum sum_at_precision(const ReproductionLaw& law, double alpha, double t, std::complex<double> beta,
                        mp::Precision bits) {
  const PsiLadder ladder(law, alpha, beta, bits);
  // Once n + 1 > |t| sup|psi| the terms shrink monotonically, so the small-term
  // stopping rule is only trusted from there on. |psi| <= 1 + phi(Re beta).
  const double bound = 1.0 + std::max(0.0, phi(law, beta.real()));
  const long safe_from = static_cast<long>(std::ceil(std::abs(t) * bound)) + 1;

  const mp::BigFloat minus_t(-t, bits);
  mp::BigComplex term(mp::BigFloat(1.0, bits), mp::BigFloat(bits));
  mp::BigComplex sum = term;
  mp::BigFloat max_term(1.0, bits);
  const mp::BigFloat ulp = mp::pow(mp::BigFloat(2.0, bits), mp::BigFloat(-static_cast<double>(bits), bits));
  int small_run = 0;
  long n = 1;
  constexpr long kMaxTerms = 2'000'000;
  // alpha = 0: every factor is psi(beta)
  const mp::BigComplex constant_factor = alpha == 0.0 ? ladder(0) : mp::BigComplex(bits);
  for (; n < kMaxTerms; ++n) {
    term *= alpha == 0.0 ? constant_factor : ladder(n - 1);
    term *= minus_t;
    term /= static_cast<double>(n);
    sum += term;
    const mp::BigFloat size = mp::abs(term);
    if (max_term < size) max_term = size;
    if (n >= safe_from && size < ulp * max_term) {
      if (++small_run >= 10) break;
    } else {
      small_run = 0;
    }
  }
  if (n >= kMaxTerms) {
    throw PrecisionExhausted("m_series did not converge within the term budget", bits, 1.0, 0.0);
  }
  return {std::move(sum), static_cast<int>(n + 1), std::move(max_term), ladder.exact()};
}

double digits_lost(const mp::BigFloat& max_term, const mp::BigComplex& value) {
  const mp::BigFloat size = mp::abs(value);
  if (size.is_zero()) return 0.0;
  const double d = mp::log(max_term / size).to_double() / std::log(10.0);
  return std::max(0.0, d);
}

SeriesEvaluation series_impl(const ReproductionLaw& law, double alpha, double t, std::complex<double> beta,
                             const SeriesOptions& options) {
  if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
  // Domain check of the first factor; later ones move right.
  (void)phi(law, beta);

  SeriesEvaluation out;
  if (t == 0.0) {
    out.value = 1.0;
    out.big = mp::BigComplex(mp::BigFloat(1.0, options.start_bits), mp::BigFloat(options.start_bits));
    out.working_precision_bits = options.start_bits;
    out.terms_used = 1;
    out.max_term_magnitude = 1.0;
    return out;
  }

  mp::Precision bits = options.start_bits;
  RawSum previous = sum_at_precision(law, alpha, t, beta, bits);
  double change = 1.0;
  while (bits * 2 <= options.max_bits) {
    bits *= 2;
    RawSum current = sum_at_precision(law, alpha, t, beta, bits);
    const mp::BigFloat diff = mp::abs(current.value - previous.value);
    const mp::BigFloat size = mp::abs(current.value);
    change = size.is_zero() ? (diff.is_zero() ? 0.0 : 1.0) : (diff / size).to_double();
    const bool agree = diff.is_zero() || (!size.is_zero() && change <= options.rel_tol);
    previous = std::move(current);
    if (agree) {
      out.value = previous.value.to_complex();
      out.big = previous.value;
      out.working_precision_bits = bits;
      out.terms_used = previous.terms;
      out.max_term_magnitude = previous.max_term.to_double();
      out.cancellation_digits_lost = digits_lost(previous.max_term, previous.value);
      out.exact_coefficients = previous.exact;
      return out;
    }
  }
  throw PrecisionExhausted("m_series unstable at the precision cap", bits, change,
                           digits_lost(previous.max_term, previous.value));
}

}  // namespace

std::complex<double> gamma_n(const ReproductionLaw& law, double alpha, int n, std::complex<double> beta) {
  if (n < 0) throw DomainError("gamma_n needs n >= 0");
  std::complex<double> product = 1.0;
  for (int k = 0; k < n; ++k) product *= psi(law, beta + alpha * static_cast<double>(k));
  return product;
}

SeriesEvaluation m_series(const ReproductionLaw& law, double alpha, double t, std::complex<double> beta,
                          const SeriesOptions& options) {
  if (!(t >= 0.0)) throw DomainError("m_series needs t >= 0");
  return series_impl(law, alpha, t, beta, options);
}

DerivativeIdentity derivative_identity_check(const ReproductionLaw& law, double alpha, double t,
                                             double beta, int k) {
  if (k < 0) throw DomainError("derivative order must be >= 0");
  SeriesOptions fine;
  fine.rel_tol = 1e-40;
  fine.start_bits = 256;
  fine.max_bits = 8192;

  DerivativeIdentity out;
  const auto rhs_series = series_impl(law, alpha, t, beta + k * alpha, fine);
  out.rhs = rhs_series.big.re * mp::BigComplex(gamma_n(law, alpha, k, beta), 256).re;
  if (k % 2 == 1) out.rhs = -out.rhs;
  if (k == 0) {
    out.lhs = series_impl(law, alpha, t, beta, fine).big.re;
  } else {
    // k-th central difference; m is entire in t, so t - kh/2 < 0 is fine.
    // h is a power of two so every t + shift is exact in double; a rounded
    // abscissa would be amplified by h^-k.
    const double h = std::ldexp(1.0, std::ilogb(std::max(1.0, t)) - 13);
    mp::BigFloat acc(0.0, 256);
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      const double shift = (0.5 * k - j) * h;
      mp::BigFloat value = series_impl(law, alpha, t + shift, beta, fine).big.re;
      value *= binom;
      if (j % 2 == 1) acc -= value;
      else acc += value;
      binom = binom * (k - j) / (j + 1);
    }
    out.lhs = acc / std::pow(h, k);
  }
  const double scale = std::max(std::abs(out.rhs.to_double()), 1e-300);
  out.residual = std::abs((out.lhs - out.rhs).to_double()) / scale;
  return out;
}

double homogeneous_m(const ReproductionLaw& law, double t, double beta) {
  return std::exp(-t * psi(law, beta));
}

double mean_weighted_exponential(const ReproductionLaw& law, double alpha, double t) {
  if (!law.has_beta_star()) throw DomainError("law has no Malthusian exponent");
  if (!(alpha > 0.0) || !(t >= 0.0)) throw DomainError("need alpha > 0 and t >= 0");
  const double s = std::pow(t, 1.0 / alpha);
  // Terms reach exp(s) while the sum is O(1): carry s/ln 10 extra digits.
  const mp::Precision bits = 128 + static_cast<mp::Precision>(2.0 * s / std::log(2.0));
  SeriesOptions opts;
  opts.rel_tol = std::exp(-s) * 1e-20;
  opts.start_bits = bits;
  opts.max_bits = 16 * bits;

  const mp::BigFloat s_big(s, bits);
  mp::BigFloat weight(1.0, bits);  // s^k / k!
  mp::BigFloat sum(0.0, bits);
  for (int k = 0;; ++k) {
    if (k > 0) weight = weight * s_big / static_cast<double>(k);
    const auto m = series_impl(law, alpha, t, law.beta_star() + k, opts);
    mp::BigFloat term = weight * m.big.re;
    if (k % 2 == 1) sum -= term;
    else sum += term;
    // m <= 1 for beta >= beta*, so the weights bound the remaining terms
    if (k > s + 10 && (weight / mp::abs(sum)).to_double() < 1e-20) break;
    if (k > 100000) throw PrecisionExhausted("exponential functional series did not converge", bits, 1.0, 0.0);
  }
  return sum.to_double();
}

}  // namespace fragkit
