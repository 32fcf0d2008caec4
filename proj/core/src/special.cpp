#include "fragkit/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/expint.hpp>

namespace fragkit::special {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// log Gamma(z) for Re z >= 1/2.
std::complex<double> log_gamma_right(std::complex<double> z) {
  z -= 1.0;
  std::complex<double> series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) {
    series += kLanczos[i] / (z + static_cast<double>(i));
  }
  const std::complex<double> t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(series);
}

}  // namespace

std::complex<double> log_gamma(std::complex<double> z) {
  if (z.real() < 0.5) {
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * z)) -
           log_gamma_right(1.0 - z);
  }
  return log_gamma_right(z);
}

std::complex<double> gamma(std::complex<double> z) {
  if (z.imag() == 0.0) return std::tgamma(z.real());
  return std::exp(log_gamma(z));
}

double pochhammer(double a, int n) {
  double out = 1.0;
  for (int k = 0; k < n; ++k) out *= a + k;
  return out;
}

double expint_n(int n, double x) {
  if (x == 0.0) return 1.0 / (n - 1);
  return boost::math::expint(n, x);
}

}  // namespace fragkit::special
