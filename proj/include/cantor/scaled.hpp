#pragma once

// Extended-range arithmetic: values carried as mantissa * 2^exponent with the
// exponent in a wide integer.  The deep pole clusters produced by the tower
// recursion shrink roughly doubly-exponentially with depth, so their offsets
// and radii leave the ordinary double range long before the recursion depth
// of interest.  Only geometry (offsets, radii, distances) needs this; the
// rational-map values themselves stay representable as plain doubles.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

namespace cantor {

using cplx = std::complex<double>;

struct ScaledReal {
  double m = 0.0;   // mantissa: 0, or 0.5 <= |m| < 1
  int64_t e = 0;    // value = m * 2^e

  ScaledReal() = default;
  explicit ScaledReal(double v) {
    int ex = 0;
    m = std::frexp(v, &ex);
    e = ex;
  }
  ScaledReal(double mant, int64_t expo) : m(mant), e(expo) { normalize(); }

  void normalize() {
    if (m == 0.0) { e = 0; return; }
    int ex = 0;
    m = std::frexp(m, &ex);
    e += ex;
  }

  bool is_zero() const { return m == 0.0; }
  int sign() const { return m > 0.0 ? 1 : (m < 0.0 ? -1 : 0); }

  // log base 2 of |value|; -inf for zero.
  double log2_abs() const {
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log2(std::fabs(m)) + static_cast<double>(e);
  }

  // Collapse to double, saturating to +-inf / 0 outside the double range.
  double to_double() const {
    if (m == 0.0) return 0.0;
    if (e > 1100) return m > 0 ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
    if (e < -1100) return m > 0 ? 0.0 : -0.0;
    return std::ldexp(m, static_cast<int>(e));
  }
};

inline ScaledReal operator*(ScaledReal a, ScaledReal b) {
  return ScaledReal(a.m * b.m, a.e + b.e);
}
inline ScaledReal operator/(ScaledReal a, ScaledReal b) {
  return ScaledReal(a.m / b.m, a.e - b.e);
}
inline ScaledReal operator-(ScaledReal a) { return ScaledReal(-a.m, a.e); }

inline ScaledReal operator+(ScaledReal a, ScaledReal b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.e < b.e) std::swap(a, b);
  int64_t d = a.e - b.e;
  if (d > 120) return a;  // smaller addend is below one ulp of the larger
  return ScaledReal(a.m + std::ldexp(b.m, static_cast<int>(-d)), a.e);
}
inline ScaledReal operator-(ScaledReal a, ScaledReal b) { return a + (-b); }

inline bool operator<(ScaledReal a, ScaledReal b) {
  int sa = a.sign(), sb = b.sign();
  if (sa != sb) return sa < sb;
  if (sa == 0) return false;
  if (a.e != b.e) return sa > 0 ? a.e < b.e : a.e > b.e;
  return a.m < b.m;
}
inline bool operator>(ScaledReal a, ScaledReal b) { return b < a; }
inline bool operator<=(ScaledReal a, ScaledReal b) { return !(b < a); }
inline bool operator>=(ScaledReal a, ScaledReal b) { return !(a < b); }

inline ScaledReal operator*(double s, ScaledReal a) { return ScaledReal(s) * a; }
inline ScaledReal operator*(ScaledReal a, double s) { return a * ScaledReal(s); }

inline ScaledReal abs(ScaledReal a) { return ScaledReal(std::fabs(a.m), a.e); }

inline ScaledReal sqrt(ScaledReal a) {
  if (a.is_zero()) return ScaledReal();
  int64_t e = a.e;
  double m = a.m;
  if (e & 1) { m *= 2.0; e -= 1; }
  return ScaledReal(std::sqrt(m), e / 2);
}

inline ScaledReal max(ScaledReal a, ScaledReal b) { return a < b ? b : a; }
inline ScaledReal min(ScaledReal a, ScaledReal b) { return a < b ? a : b; }

// Exact power of two.
inline ScaledReal pow2(int64_t k) { return ScaledReal(0.5, k + 1); }

struct ScaledComplex {
  cplx m = {0.0, 0.0};  // mantissa: 0, or 0.5 <= max(|re|,|im|) < 1
  int64_t e = 0;        // value = m * 2^e

  ScaledComplex() = default;
  explicit ScaledComplex(cplx v) : m(v), e(0) { normalize(); }
  ScaledComplex(cplx mant, int64_t expo) : m(mant), e(expo) { normalize(); }
  ScaledComplex(double re, double im) : m(re, im), e(0) { normalize(); }

  void normalize() {
    double top = std::max(std::fabs(m.real()), std::fabs(m.imag()));
    if (top == 0.0) { m = {0.0, 0.0}; e = 0; return; }
    int ex = 0;
    std::frexp(top, &ex);
    m = {std::ldexp(m.real(), -ex), std::ldexp(m.imag(), -ex)};
    e += ex;
  }

  bool is_zero() const { return m.real() == 0.0 && m.imag() == 0.0; }

  cplx to_cplx() const {
    if (is_zero()) return {0.0, 0.0};
    if (e > 1100) {
      double inf = std::numeric_limits<double>::infinity();
      return {m.real() > 0 ? inf : (m.real() < 0 ? -inf : 0.0),
              m.imag() > 0 ? inf : (m.imag() < 0 ? -inf : 0.0)};
    }
    if (e < -1100) return {0.0, 0.0};
    int ex = static_cast<int>(e);
    return {std::ldexp(m.real(), ex), std::ldexp(m.imag(), ex)};
  }
};

inline ScaledComplex operator*(ScaledComplex a, ScaledComplex b) {
  return ScaledComplex(a.m * b.m, a.e + b.e);
}
inline ScaledComplex operator*(ScaledReal s, ScaledComplex a) {
  return ScaledComplex(s.m * a.m, s.e + a.e);
}
inline ScaledComplex operator*(double s, ScaledComplex a) {
  return ScaledReal(s) * a;
}
inline ScaledComplex operator*(ScaledComplex a, ScaledReal s) { return s * a; }
inline ScaledComplex operator/(ScaledComplex a, ScaledComplex b) {
  return ScaledComplex(a.m / b.m, a.e - b.e);
}
inline ScaledComplex operator/(ScaledComplex a, ScaledReal s) {
  return ScaledComplex(a.m / s.m, a.e - s.e);
}
inline ScaledComplex operator-(ScaledComplex a) { return ScaledComplex(-a.m, a.e); }

inline ScaledComplex operator+(ScaledComplex a, ScaledComplex b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.e < b.e) std::swap(a, b);
  int64_t d = a.e - b.e;
  if (d > 120) return a;
  int ex = static_cast<int>(-d);
  cplx small = {std::ldexp(b.m.real(), ex), std::ldexp(b.m.imag(), ex)};
  return ScaledComplex(a.m + small, a.e);
}
inline ScaledComplex operator-(ScaledComplex a, ScaledComplex b) { return a + (-b); }

inline ScaledReal abs(ScaledComplex a) { return ScaledReal(std::abs(a.m), a.e); }

inline ScaledComplex reciprocal(ScaledComplex a) {
  return ScaledComplex(1.0 / a.m, -a.e);
}

}  // namespace cantor
