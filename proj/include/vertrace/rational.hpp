#ifndef VERTRACE_RATIONAL_HPP
#define VERTRACE_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <ostream>

namespace vertrace {

using Rational = boost::multiprecision::cpp_rational;

/// Complex number over exact rationals. Used for the algebra-identity test
/// mode where results must hold exactly; spectral work stays in doubles.
struct CRat {
  Rational re{0};
  Rational im{0};

  CRat() = default;
  CRat(long r) : re(r) {}
  CRat(Rational r) : re(std::move(r)) {}
  CRat(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static CRat i() { return CRat{Rational(0), Rational(1)}; }

  bool is_zero() const { return re == 0 && im == 0; }

  friend CRat operator+(const CRat& a, const CRat& b) { return {a.re + b.re, a.im + b.im}; }
  friend CRat operator-(const CRat& a, const CRat& b) { return {a.re - b.re, a.im - b.im}; }
  friend CRat operator-(const CRat& a) { return {-a.re, -a.im}; }
  friend CRat operator*(const CRat& a, const CRat& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend CRat operator/(const CRat& a, const CRat& b) {
    Rational d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  CRat& operator+=(const CRat& b) { *this = *this + b; return *this; }
  CRat& operator-=(const CRat& b) { *this = *this - b; return *this; }
  CRat& operator*=(const CRat& b) { *this = *this * b; return *this; }
  friend bool operator==(const CRat& a, const CRat& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const CRat& a, const CRat& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const CRat& c) {
    return os << "(" << c.re << (c.im >= 0 ? "+" : "") << c.im << "i)";
  }
};

inline CRat conj(const CRat& c) { return {c.re, -c.im}; }
inline std::complex<double> to_complex(const CRat& c) {
  return {c.re.convert_to<double>(), c.im.convert_to<double>()};
}

/// Map i^k into the Gaussian rationals.
inline CRat crat_ipow(long k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return CRat(1);
    case 1: return CRat::i();
    case 2: return CRat(-1);
    default: return -CRat::i();
  }
}

// Uniform scalar interface shared by CRat and std::complex<double>.
template <class S>
struct scalar_ops;

template <>
struct scalar_ops<CRat> {
  static CRat zero() { return CRat(); }
  static CRat one() { return CRat(1); }
  static CRat from_int(long v) { return CRat(v); }
  static CRat conj(const CRat& c) { return vertrace::conj(c); }
  static bool is_zero(const CRat& c) { return c.is_zero(); }
  static double abs(const CRat& c) { return std::abs(to_complex(c)); }
};

template <>
struct scalar_ops<std::complex<double>> {
  using C = std::complex<double>;
  static C zero() { return {0.0, 0.0}; }
  static C one() { return {1.0, 0.0}; }
  static C from_int(long v) { return {double(v), 0.0}; }
  static C conj(const C& c) { return std::conj(c); }
  static bool is_zero(const C& c) { return c == C{0.0, 0.0}; }
  static double abs(const C& c) { return std::abs(c); }
};

}  // namespace vertrace

#endif
