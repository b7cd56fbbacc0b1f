#ifndef VERTRACE_TRIG_POLY_HPP
#define VERTRACE_TRIG_POLY_HPP

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

#include "vertrace/rational.hpp"

namespace vertrace {

/// Finitely supported Fourier series sum_k c_k e^{ikx} on the fiber
/// coordinate x in [0, 2pi). Exact over CRat for symbol algebra; also used
/// with complex<double> coefficients for numeric phases/amplitudes.
template <class C>
class TrigPoly {
 public:
  TrigPoly() = default;
  explicit TrigPoly(C constant) {
    if (!scalar_ops<C>::is_zero(constant)) coef_[0] = std::move(constant);
  }

  static TrigPoly harmonic(int k, C c) {
    TrigPoly t;
    if (!scalar_ops<C>::is_zero(c)) t.coef_[k] = std::move(c);
    return t;
  }

  /// Build from cosine/sine series: sum a_k cos(kx) + sum b_k sin(kx),
  /// a/b indexed from k = 0 and k = 1 respectively.
  static TrigPoly from_cos_sin(const std::vector<C>& a, const std::vector<C>& b) {
    TrigPoly t;
    const C half = scalar_ops<C>::one() / scalar_ops<C>::from_int(2);
    if (!a.empty()) t.add(0, a[0]);
    for (size_t k = 1; k < a.size(); ++k) {
      t.add(int(k), half * a[k]);
      t.add(-int(k), half * a[k]);
    }
    for (size_t k = 1; k < b.size(); ++k) {
      // sin(kx) = -(i/2) e^{ikx} + (i/2) e^{-ikx}
      C c = b[k] * half * imag_unit();
      t.add(int(k), scalar_ops<C>::from_int(-1) * c);
      t.add(-int(k), c);
    }
    return t;
  }

  const std::map<int, C>& coefficients() const { return coef_; }
  bool is_zero() const { return coef_.empty(); }

  void add(int k, const C& c) {
    auto it = coef_.find(k);
    if (it == coef_.end()) {
      if (!scalar_ops<C>::is_zero(c)) coef_[k] = c;
    } else {
      it->second = it->second + c;
      if (scalar_ops<C>::is_zero(it->second)) coef_.erase(it);
    }
  }

  friend TrigPoly operator+(const TrigPoly& x, const TrigPoly& y) {
    TrigPoly r = x;
    for (const auto& [k, c] : y.coef_) r.add(k, c);
    return r;
  }
  friend TrigPoly operator-(const TrigPoly& x, const TrigPoly& y) {
    TrigPoly r = x;
    for (const auto& [k, c] : y.coef_) r.add(k, scalar_ops<C>::from_int(-1) * c);
    return r;
  }
  friend TrigPoly operator*(const TrigPoly& x, const TrigPoly& y) {
    TrigPoly r;
    for (const auto& [k1, c1] : x.coef_)
      for (const auto& [k2, c2] : y.coef_) r.add(k1 + k2, c1 * c2);
    return r;
  }
  friend TrigPoly operator*(const C& s, const TrigPoly& x) {
    TrigPoly r;
    for (const auto& [k, c] : x.coef_) r.add(k, s * c);
    return r;
  }

  /// d/dx: multiplies the k-th coefficient by ik.
  TrigPoly derivative() const {
    TrigPoly r;
    for (const auto& [k, c] : coef_) r.add(k, imag_unit() * scalar_ops<C>::from_int(k) * c);
    return r;
  }

  std::complex<double> eval(double x) const {
    std::complex<double> v = 0.0;
    for (const auto& [k, c] : coef_) v += to_std(c) * std::exp(std::complex<double>(0.0, k * x));
    return v;
  }

  /// Conjugate-symmetric coefficients <=> real-valued function.
  bool is_real_valued() const {
    for (const auto& [k, c] : coef_) {
      auto it = coef_.find(-k);
      if (it == coef_.end()) return false;
      if (!scalar_ops<C>::is_zero(it->second - scalar_ops<C>::conj(c))) return false;
    }
    return true;
  }

  int max_frequency() const {
    int m = 0;
    for (const auto& [k, c] : coef_) m = std::max(m, std::abs(k));
    return m;
  }

  /// Positivity certificate by dense sampling plus a derivative bound:
  /// min sample - (pi/N) * sup|f'| > 0 implies f > 0 everywhere.
  bool is_positive(int samples = 1024) const {
    double sup_deriv = 0.0;
    for (const auto& [k, c] : coef_) sup_deriv += std::abs(k) * scalar_ops<C>::abs(c);
    double minv = 1e300;
    for (int i = 0; i < samples; ++i) minv = std::min(minv, eval(2.0 * M_PI * i / samples).real());
    return minv - M_PI / samples * sup_deriv > 0.0;
  }

 private:
  static C imag_unit() {
    if constexpr (std::is_same_v<C, CRat>)
      return CRat::i();
    else
      return C(0.0, 1.0);
  }
  static std::complex<double> to_std(const C& c) {
    if constexpr (std::is_same_v<C, CRat>)
      return to_complex(c);
    else
      return c;
  }

  std::map<int, C> coef_;
};

using TrigQ = TrigPoly<CRat>;
using TrigC = TrigPoly<std::complex<double>>;

}  // namespace vertrace

#endif
