// Exact scalar arithmetic: arbitrary-precision rationals and rational
// complex numbers (a + b*i with rational a, b).  These are the coefficient
// scalars for the whole exact pipeline; floating-point views are derived,
// never the source of truth.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

namespace memint {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& r);

// Renders "p/q" when q != 1, otherwise just "p".
std::string rational_to_string(const Rational& r);

// Parses "p", "p/q", or decimal-free signed integers thereof.  `what` names
// the field in error messages.  Throws std::invalid_argument on bad input.
Rational parse_rational(std::string_view text, const std::string& what);

// Rational complex scalar.  Purely real values keep imag() == 0, and all
// operations take fast paths in that case, so real computations pay no
// complex-arithmetic overhead.
class ExactScalar {
 public:
  ExactScalar() = default;
  ExactScalar(int v) : re_(v) {}  // NOLINT: implicit for integer literals
  ExactScalar(Rational re) : re_(std::move(re)) {}
  ExactScalar(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  static ExactScalar i() { return ExactScalar(Rational(0), Rational(1)); }

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }
  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  bool is_real() const { return im_.is_zero(); }

  ExactScalar& operator+=(const ExactScalar& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  ExactScalar& operator-=(const ExactScalar& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  ExactScalar& operator*=(const ExactScalar& o) {
    if (im_.is_zero() && o.im_.is_zero()) {
      re_ *= o.re_;
      return *this;
    }
    Rational re = re_ * o.re_ - im_ * o.im_;
    Rational im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
  }

  friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
  friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
  friend ExactScalar operator*(ExactScalar a, const ExactScalar& b) { return a *= b; }
  ExactScalar operator-() const { return ExactScalar(-re_, -im_); }

  friend bool operator==(const ExactScalar& a, const ExactScalar& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const ExactScalar& a, const ExactScalar& b) { return !(a == b); }

  // Exact division by a nonzero integer (used by antiderivatives).
  ExactScalar divided_by(const Int& k) const {
    return ExactScalar(re_ / Rational(k), im_ / Rational(k));
  }
  ExactScalar divided_by(const Rational& k) const { return ExactScalar(re_ / k, im_ / k); }

  std::complex<double> to_complex() const { return {to_double(re_), to_double(im_)}; }
  double abs_double() const { return std::abs(to_complex()); }

  // "2/3", "-1", "i", "1/2 - 2/3 i", "0".
  std::string str() const;

 private:
  Rational re_{0};
  Rational im_{0};
};

}  // namespace memint
