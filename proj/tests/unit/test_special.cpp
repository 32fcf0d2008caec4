#include <gtest/gtest.h>

#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <numbers>

#include "../support/oracles.hpp"
#include "fragkit/bigfloat.hpp"
#include "fragkit/special.hpp"

namespace sp = fragkit::special;
namespace mp = fragkit::mp;

TEST(Special, LogGammaMatchesStdOnReals) {
  for (double x : {0.1, 0.5, 1.0, 2.5, 7.3, 30.0, 150.0}) {
    EXPECT_NEAR(sp::log_gamma({x, 0.0}).real(), std::lgamma(x), 1e-12 * std::max(1.0, std::abs(std::lgamma(x))));
  }
}

TEST(Special, ComplexGammaAgainstStirlingOracle) {
  oracle::Gen gen(1);
  for (int i = 0; i < 200; ++i) {
    const std::complex<double> z(gen.uniform(-4.5, 10.0), gen.uniform(-6.0, 6.0));
    if (std::abs(z.imag()) < 0.05 && z.real() < 0.5) continue;
    const auto got = sp::gamma(z);
    const auto ref = std::exp(oracle::log_gamma(z));
    EXPECT_LT(std::abs(got - ref) / std::abs(ref), 1e-11) << z;
  }
}

TEST(Special, ReflectionFormula) {
  oracle::Gen gen(2);
  for (int i = 0; i < 100; ++i) {
    const std::complex<double> z(gen.uniform(-3.0, 3.0), gen.uniform(0.1, 2.0));
    const auto lhs = sp::gamma(z) * sp::gamma(1.0 - z);
    const auto rhs = std::numbers::pi / std::sin(std::numbers::pi * z);
    EXPECT_LT(std::abs(lhs - rhs) / std::abs(rhs), 1e-11);
  }
}

TEST(Special, Pochhammer) {
  EXPECT_DOUBLE_EQ(sp::pochhammer(2.0, 0), 1.0);
  EXPECT_DOUBLE_EQ(sp::pochhammer(2.0, 3), 24.0);
  EXPECT_NEAR(sp::pochhammer(0.5, 4), 0.5 * 1.5 * 2.5 * 3.5, 1e-14);
}

TEST(Special, ExpintAgainstBoost) {
  for (int n : {1, 2, 3}) {
    for (double x : {0.01, 0.3, 1.0, 4.0, 20.0}) {
      const double ref = boost::math::expint(n, x);
      EXPECT_NEAR(sp::expint_n(n, x), ref, 1e-12 * ref) << n << ' ' << x;
    }
  }
}

TEST(BigFloat, ArithmeticAndStrings) {
  const mp::BigFloat third = mp::BigFloat(1.0, 256) / mp::BigFloat(3.0, 256);
  EXPECT_EQ(third.to_string(30).substr(0, 12), "0.3333333333");
  const mp::BigFloat back = third * 3.0 - 1.0;
  EXPECT_LT(mp::abs(back).to_double(), 1e-70);
  const mp::BigFloat e = mp::exp(mp::BigFloat(1.0, 200));
  EXPECT_NEAR(mp::log(e).to_double(), 1.0, 1e-16);
  EXPECT_TRUE(mp::BigFloat("0.02", 128) < mp::BigFloat(0.020000000000000001, 128) ||
              mp::BigFloat("0.02", 128) > mp::BigFloat(0.020000000000000001, 128));
}

TEST(BigComplex, RealPow) {
  const mp::BigFloat x(2.0, 128);
  const mp::BigComplex w({0.5, 1.0}, 128);
  const auto got = mp::real_pow(x, w).to_complex();
  const auto ref = std::exp(std::complex<double>(0.5, 1.0) * std::log(2.0));
  EXPECT_LT(std::abs(got - ref), 1e-15);
}
