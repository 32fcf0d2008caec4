#pragma once

#include <stdexcept>
#include <string>

namespace fragkit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an analytic object (e.g. Re beta <= beta_a).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// phi(beta) = 1 has no real root because phi(beta_a+) < 1.
class NoMalthusianExponent : public Error {
 public:
  NoMalthusianExponent(const std::string& what, double phi_at_abscissa)
      : Error(what), phi_at_abscissa_(phi_at_abscissa) {}
  double phi_at_abscissa() const noexcept { return phi_at_abscissa_; }

 private:
  double phi_at_abscissa_;
};

/// Law has neither a closed-form Mellin transform nor a quadrature representation.
class NoClosedForm : public Error {
 public:
  using Error::Error;
};

class UnsupportedSampler : public Error {
 public:
  using Error::Error;
};

class UnsupportedTilt : public Error {
 public:
  using Error::Error;
};

class UnsupportedRepresentation : public Error {
 public:
  using Error::Error;
};

class InvalidIntensity : public Error {
 public:
  using Error::Error;
};

class InvalidLawSpec : public Error {
 public:
  using Error::Error;
};

/// z lies in the pole set of gamma(., beta), or beta = beta* in the asymptotic coefficient.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// Asymptotic coefficient requested for an arithmetic structural measure.
class ArithmeticLaw : public Error {
 public:
  using Error::Error;
};

class RootFindingFailure : public Error {
 public:
  using Error::Error;
};

/// Series evaluation did not stabilise below the precision cap.
class PrecisionExhausted : public Error {
 public:
  PrecisionExhausted(const std::string& what, long last_precision_bits,
                     double last_relative_change, double digits_lost)
      : Error(what),
        last_precision_bits_(last_precision_bits),
        last_relative_change_(last_relative_change),
        digits_lost_(digits_lost) {}
  long last_precision_bits() const noexcept { return last_precision_bits_; }
  double last_relative_change() const noexcept { return last_relative_change_; }
  double digits_lost() const noexcept { return digits_lost_; }

 private:
  long last_precision_bits_;
  double last_relative_change_;
  double digits_lost_;
};

/// Every replicate in a snapshot set went extinct.
class EmptySnapshot : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo estimate of E (sum xi^beta*)^2 did not settle.
class SecondMomentInfinite : public Error {
 public:
  using Error::Error;
};

}  // namespace fragkit
