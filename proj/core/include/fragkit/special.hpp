#pragma once

#include <complex>

namespace fragkit::special {

/// log Gamma(z) for complex z off the non-positive integers. The imaginary
/// part is not branch-normalised; exponentiate before comparing values.
std::complex<double> log_gamma(std::complex<double> z);

/// Gamma(z) for complex z (Lanczos, g = 7, with reflection for Re z < 1/2).
std::complex<double> gamma(std::complex<double> z);

/// Rising factorial (a)_n = a (a+1) ... (a+n-1); (a)_0 = 1.
double pochhammer(double a, int n);

/// Generalised exponential integral E_n(x) for x >= 0 (E_n(0) = 1/(n-1), n >= 2).
double expint_n(int n, double x);

}  // namespace fragkit::special
