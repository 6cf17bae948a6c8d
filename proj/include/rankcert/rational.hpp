#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "rankcert/errors.hpp"

namespace rankcert {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// Ceiling of a/b for b > 0 (cpp_int division truncates toward zero).
inline Int ceil_div(const Int& a, const Int& b) {
  Int q = a / b;
  if (a % b != 0 && a > 0) ++q;
  return q;
}

inline Int ceil_rational(const Rational& x) {
  return ceil_div(numerator(x), denominator(x));
}

// Serialized form always carries the denominator: "p/q".
inline std::string rat_str(const Rational& x) {
  return numerator(x).str() + "/" + denominator(x).str();
}

// True for tokens of the shape [+-]digits or [+-]digits/digits.
inline bool looks_like_rational(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i >= s.size()) return false;
  bool digits = false, slash = false;
  for (; i < s.size(); ++i) {
    if (s[i] >= '0' && s[i] <= '9') {
      digits = true;
    } else if (s[i] == '/' && !slash && digits) {
      slash = true;
      digits = false;
    } else {
      return false;
    }
  }
  return digits;
}

inline Rational parse_rational(const std::string& s) {
  if (!looks_like_rational(s))
    throw BadFormat("not a rational literal: '" + s + "'");
  auto pos = s.find('/');
  if (pos == std::string::npos) return Rational(Int(s));
  Int num(s.substr(0, pos)), den(s.substr(pos + 1));
  if (den == 0) throw BadFormat("zero denominator in '" + s + "'");
  return Rational(num, den);
}

// Exact binary expansion of a finite double.
inline Rational rational_from_double(double x) {
  if (x == 0.0) return Rational(0);
  if (!std::isfinite(x)) throw InvalidParams("non-finite value has no rational form");
  int e = 0;
  double mant = std::frexp(x, &e);
  auto mi = static_cast<long long>(std::ldexp(mant, 53));
  Rational r = Int(mi);
  int shift = e - 53;
  if (shift > 0)
    r *= Rational(Int(1) << shift);
  else if (shift < 0)
    r /= Rational(Int(1) << (-shift));
  return r;
}

// Complex number with rational real and imaginary parts.
struct GaussianRational {
  Rational re, im;

  GaussianRational() = default;
  GaussianRational(Rational r, Rational i = Rational(0))
      : re(std::move(r)), im(std::move(i)) {}
  GaussianRational(long long r) : re(r) {}  // NOLINT(google-explicit-constructor)

  bool is_zero() const { return re == 0 && im == 0; }
  GaussianRational conj() const { return {re, -im}; }
  Rational norm_sq() const { return re * re + im * im; }
  Complex to_complex() const { return {to_double(re), to_double(im)}; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    Rational den = b.norm_sq();
    if (den == 0) throw InvalidParams("division by exact zero");
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
  }
  GaussianRational& operator+=(const GaussianRational& b) { return *this = *this + b; }
  GaussianRational& operator-=(const GaussianRational& b) { return *this = *this - b; }
  GaussianRational& operator*=(const GaussianRational& b) { return *this = *this * b; }
};

}  // namespace rankcert
