#pragma once

#include <mpfr.h>

#include <complex>
#include <string>
#include <string_view>

namespace fragkit::mp {

using Precision = mpfr_prec_t;

/// Owning handle around an MPFR number. Each value carries its own precision;
/// binary operations round to the larger precision of the two operands.
class BigFloat {
 public:
  explicit BigFloat(Precision bits = 53);
  BigFloat(double value, Precision bits);
  BigFloat(std::string_view decimal, Precision bits);

  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  Precision precision() const noexcept { return mpfr_get_prec(value_); }
  double to_double() const noexcept { return mpfr_get_d(value_, MPFR_RNDN); }
  bool is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(value_) != 0; }
  int sign() const noexcept { return mpfr_sgn(value_); }
  /// Binary exponent e with |x| in [2^(e-1), 2^e); meaningless for zero.
  long exponent2() const noexcept { return mpfr_get_exp(value_); }
  std::string to_string(int significant_digits) const;

  mpfr_ptr raw() noexcept { return value_; }
  mpfr_srcptr raw() const noexcept { return value_; }

  BigFloat& operator+=(const BigFloat& rhs);
  BigFloat& operator-=(const BigFloat& rhs);
  BigFloat& operator*=(const BigFloat& rhs);
  BigFloat& operator/=(const BigFloat& rhs);
  BigFloat& operator+=(double rhs);
  BigFloat& operator-=(double rhs);
  BigFloat& operator*=(double rhs);
  BigFloat& operator/=(double rhs);
  BigFloat operator-() const;

 private:
  mpfr_t value_;
};

BigFloat operator+(BigFloat lhs, const BigFloat& rhs);
BigFloat operator-(BigFloat lhs, const BigFloat& rhs);
BigFloat operator*(BigFloat lhs, const BigFloat& rhs);
BigFloat operator/(BigFloat lhs, const BigFloat& rhs);
BigFloat operator+(BigFloat lhs, double rhs);
BigFloat operator-(BigFloat lhs, double rhs);
BigFloat operator*(BigFloat lhs, double rhs);
BigFloat operator/(BigFloat lhs, double rhs);
BigFloat operator-(double lhs, const BigFloat& rhs);
BigFloat operator/(double lhs, const BigFloat& rhs);

bool operator<(const BigFloat& a, const BigFloat& b);
bool operator>(const BigFloat& a, const BigFloat& b);
bool operator<=(const BigFloat& a, const BigFloat& b);

BigFloat abs(const BigFloat& x);
BigFloat exp(const BigFloat& x);
BigFloat log(const BigFloat& x);
BigFloat sqrt(const BigFloat& x);
BigFloat sin(const BigFloat& x);
BigFloat cos(const BigFloat& x);
BigFloat pow(const BigFloat& base, const BigFloat& exponent);
BigFloat hypot(const BigFloat& a, const BigFloat& b);
BigFloat atan2(const BigFloat& y, const BigFloat& x);
/// Copy of x rounded to `bits`.
BigFloat with_precision(const BigFloat& x, Precision bits);

/// Complex number with BigFloat parts.
struct BigComplex {
  BigFloat re;
  BigFloat im;

  explicit BigComplex(Precision bits = 53) : re(bits), im(bits) {}
  BigComplex(BigFloat real, BigFloat imag) : re(std::move(real)), im(std::move(imag)) {}
  BigComplex(std::complex<double> z, Precision bits)
      : re(z.real(), bits), im(z.imag(), bits) {}

  Precision precision() const noexcept;
  std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }
  bool is_zero() const noexcept { return re.is_zero() && im.is_zero(); }
  bool is_real() const noexcept { return im.is_zero(); }

  BigComplex& operator+=(const BigComplex& rhs);
  BigComplex& operator-=(const BigComplex& rhs);
  BigComplex& operator*=(const BigComplex& rhs);
  BigComplex& operator/=(const BigComplex& rhs);
  BigComplex& operator*=(const BigFloat& rhs);
  BigComplex& operator*=(double rhs);
  BigComplex& operator/=(double rhs);
  BigComplex& operator+=(double rhs);
};

BigComplex operator+(BigComplex lhs, const BigComplex& rhs);
BigComplex operator-(BigComplex lhs, const BigComplex& rhs);
BigComplex operator*(BigComplex lhs, const BigComplex& rhs);
BigComplex operator/(BigComplex lhs, const BigComplex& rhs);
BigComplex operator+(BigComplex lhs, double rhs);
BigComplex operator-(double lhs, const BigComplex& rhs);
BigComplex operator/(double lhs, const BigComplex& rhs);

BigFloat abs(const BigComplex& z);
/// exp(w * log(x)) for real x > 0.
BigComplex real_pow(const BigFloat& x, const BigComplex& w);

}  // namespace fragkit::mp
