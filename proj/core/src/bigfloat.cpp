#include "fragkit/bigfloat.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>

namespace fragkit::mp {

namespace {

Precision max_prec(mpfr_srcptr a, mpfr_srcptr b) {
  return std::max(mpfr_get_prec(a), mpfr_get_prec(b));
}

// Raise the precision of `target` (keeping its value) to at least `bits`.
void widen(mpfr_ptr target, Precision bits) {
  if (mpfr_get_prec(target) < bits) mpfr_prec_round(target, bits, MPFR_RNDN);
}

}  // namespace

BigFloat::BigFloat(Precision bits) {
  mpfr_init2(value_, bits);
  mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(double value, Precision bits) {
  mpfr_init2(value_, bits);
  mpfr_set_d(value_, value, MPFR_RNDN);
}

BigFloat::BigFloat(std::string_view decimal, Precision bits) {
  mpfr_init2(value_, bits);
  const std::string text(decimal);
  mpfr_set_str(value_, text.c_str(), 10, MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  // Steal the limbs and leave `other` as a valid 2-bit zero.
  *value_ = *other.value_;
  mpfr_init2(other.value_, MPFR_PREC_MIN);
  mpfr_set_zero(other.value_, 1);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  if (this != &other) mpfr_swap(value_, other.value_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

std::string BigFloat::to_string(int significant_digits) const {
  const int digits = std::max(1, significant_digits);
  const int size = mpfr_snprintf(nullptr, 0, "%.*Rg", digits, value_);
  std::string out(static_cast<std::size_t>(size) + 1, '\0');
  mpfr_snprintf(out.data(), out.size(), "%.*Rg", digits, value_);
  out.resize(static_cast<std::size_t>(size));
  return out;
}

BigFloat& BigFloat::operator+=(const BigFloat& rhs) {
  widen(value_, rhs.precision());
  mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}
BigFloat& BigFloat::operator-=(const BigFloat& rhs) {
  widen(value_, rhs.precision());
  mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}
BigFloat& BigFloat::operator*=(const BigFloat& rhs) {
  widen(value_, rhs.precision());
  mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}
BigFloat& BigFloat::operator/=(const BigFloat& rhs) {
  widen(value_, rhs.precision());
  mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}
BigFloat& BigFloat::operator+=(double rhs) {
  mpfr_add_d(value_, value_, rhs, MPFR_RNDN);
  return *this;
}
BigFloat& BigFloat::operator-=(double rhs) {
  mpfr_sub_d(value_, value_, rhs, MPFR_RNDN);
  return *this;
}
BigFloat& BigFloat::operator*=(double rhs) {
  mpfr_mul_d(value_, value_, rhs, MPFR_RNDN);
  return *this;
}
BigFloat& BigFloat::operator/=(double rhs) {
  mpfr_div_d(value_, value_, rhs, MPFR_RNDN);
  return *this;
}
BigFloat BigFloat::operator-() const {
  BigFloat out(*this);
  mpfr_neg(out.value_, out.value_, MPFR_RNDN);
  return out;
}

BigFloat operator+(BigFloat lhs, const BigFloat& rhs) { return lhs += rhs; }
BigFloat operator-(BigFloat lhs, const BigFloat& rhs) { return lhs -= rhs; }
BigFloat operator*(BigFloat lhs, const BigFloat& rhs) { return lhs *= rhs; }
BigFloat operator/(BigFloat lhs, const BigFloat& rhs) { return lhs /= rhs; }
BigFloat operator+(BigFloat lhs, double rhs) { return lhs += rhs; }
BigFloat operator-(BigFloat lhs, double rhs) { return lhs -= rhs; }
BigFloat operator*(BigFloat lhs, double rhs) { return lhs *= rhs; }
BigFloat operator/(BigFloat lhs, double rhs) { return lhs /= rhs; }
BigFloat operator-(double lhs, const BigFloat& rhs) {
  BigFloat out(rhs.precision());
  mpfr_d_sub(out.raw(), lhs, rhs.raw(), MPFR_RNDN);
  return out;
}
BigFloat operator/(double lhs, const BigFloat& rhs) {
  BigFloat out(rhs.precision());
  mpfr_d_div(out.raw(), lhs, rhs.raw(), MPFR_RNDN);
  return out;
}

bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.raw(), b.raw()) != 0; }
bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.raw(), b.raw()) != 0; }
bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.raw(), b.raw()) != 0; }

#define FRAGKIT_UNARY(name, fn)                     \
  BigFloat name(const BigFloat& x) {                \
    BigFloat out(x.precision());                    \
    fn(out.raw(), x.raw(), MPFR_RNDN);              \
    return out;                                     \
  }
FRAGKIT_UNARY(abs, mpfr_abs)
FRAGKIT_UNARY(exp, mpfr_exp)
FRAGKIT_UNARY(log, mpfr_log)
FRAGKIT_UNARY(sqrt, mpfr_sqrt)
FRAGKIT_UNARY(sin, mpfr_sin)
FRAGKIT_UNARY(cos, mpfr_cos)
#undef FRAGKIT_UNARY

BigFloat pow(const BigFloat& base, const BigFloat& exponent) {
  BigFloat out(max_prec(base.raw(), exponent.raw()));
  mpfr_pow(out.raw(), base.raw(), exponent.raw(), MPFR_RNDN);
  return out;
}

BigFloat hypot(const BigFloat& a, const BigFloat& b) {
  BigFloat out(max_prec(a.raw(), b.raw()));
  mpfr_hypot(out.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return out;
}

BigFloat atan2(const BigFloat& y, const BigFloat& x) {
  BigFloat out(max_prec(y.raw(), x.raw()));
  mpfr_atan2(out.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return out;
}

BigFloat with_precision(const BigFloat& x, Precision bits) {
  BigFloat out(bits);
  mpfr_set(out.raw(), x.raw(), MPFR_RNDN);
  return out;
}

Precision BigComplex::precision() const noexcept {
  return std::max(re.precision(), im.precision());
}

BigComplex& BigComplex::operator+=(const BigComplex& rhs) {
  re += rhs.re;
  im += rhs.im;
  return *this;
}
BigComplex& BigComplex::operator-=(const BigComplex& rhs) {
  re -= rhs.re;
  im -= rhs.im;
  return *this;
}
BigComplex& BigComplex::operator*=(const BigComplex& rhs) {
  if (im.is_zero() && rhs.im.is_zero()) {
    re *= rhs.re;
    return *this;
  }
  BigFloat new_re = re * rhs.re - im * rhs.im;
  BigFloat new_im = re * rhs.im + im * rhs.re;
  re = std::move(new_re);
  im = std::move(new_im);
  return *this;
}
BigComplex& BigComplex::operator/=(const BigComplex& rhs) {
  if (rhs.im.is_zero()) {
    re /= rhs.re;
    im /= rhs.re;
    return *this;
  }
  BigFloat denom = rhs.re * rhs.re + rhs.im * rhs.im;
  BigFloat new_re = (re * rhs.re + im * rhs.im) / denom;
  BigFloat new_im = (im * rhs.re - re * rhs.im) / denom;
  re = std::move(new_re);
  im = std::move(new_im);
  return *this;
}
BigComplex& BigComplex::operator*=(const BigFloat& rhs) {
  re *= rhs;
  im *= rhs;
  return *this;
}
BigComplex& BigComplex::operator*=(double rhs) {
  re *= rhs;
  im *= rhs;
  return *this;
}
BigComplex& BigComplex::operator/=(double rhs) {
  re /= rhs;
  im /= rhs;
  return *this;
}
BigComplex& BigComplex::operator+=(double rhs) {
  re += rhs;
  return *this;
}

BigComplex operator+(BigComplex lhs, const BigComplex& rhs) { return lhs += rhs; }
BigComplex operator-(BigComplex lhs, const BigComplex& rhs) { return lhs -= rhs; }
BigComplex operator*(BigComplex lhs, const BigComplex& rhs) { return lhs *= rhs; }
BigComplex operator/(BigComplex lhs, const BigComplex& rhs) { return lhs /= rhs; }
BigComplex operator+(BigComplex lhs, double rhs) { return lhs += rhs; }
BigComplex operator-(double lhs, const BigComplex& rhs) {
  return BigComplex(lhs - rhs.re, -rhs.im);
}
BigComplex operator/(double lhs, const BigComplex& rhs) {
  BigComplex num(BigFloat(lhs, rhs.precision()), BigFloat(rhs.precision()));
  return num /= rhs;
}

BigFloat abs(const BigComplex& z) { return hypot(z.re, z.im); }

BigComplex real_pow(const BigFloat& x, const BigComplex& w) {
  const BigFloat lx = log(x);
  const BigFloat modulus = exp(w.re * lx);
  if (w.im.is_zero()) return BigComplex(modulus, BigFloat(modulus.precision()));
  const BigFloat angle = w.im * lx;
  return BigComplex(modulus * cos(angle), modulus * sin(angle));
}

}  // namespace fragkit::mp
