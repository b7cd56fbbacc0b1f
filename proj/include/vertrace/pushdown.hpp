#ifndef VERTRACE_PUSHDOWN_HPP
#define VERTRACE_PUSHDOWN_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

namespace vertrace {

/// Gaussian Schwartz-class fiber data f(zeta) = e^{-(zeta - center)^2 / (2 scale^2)}.
/// Closed-form Fourier transform and certified tails; the only kind
/// supported (keeps every identity check quadrature-free).
struct SchwartzFamily {
  double scale = 1.0;
  double center = 0.0;

  void validate() const {
    if (!(scale > 0.0)) throw std::invalid_argument("SchwartzFamily: scale > 0 required");
  }

  double value(double zeta) const {
    double u = (zeta - center) / scale;
    return std::exp(-0.5 * u * u);
  }

  /// F(f)(u) = int e^{i u zeta} f(zeta) d zeta = scale sqrt(2 pi) e^{i u center} e^{-scale^2 u^2 / 2}.
  std::complex<double> fourier(double u) const {
    return scale * std::sqrt(2.0 * M_PI) * std::exp(std::complex<double>(0.0, u * center)) *
           std::exp(-0.5 * scale * scale * u * u);
  }

  double integral() const { return scale * std::sqrt(2.0 * M_PI); }
};

/// k-fold circle cover kS^1 -> S^1: the deck group acts on the universal
/// cover R by translations of `step` (2 pi k for the k-fold cover).
struct CoverSpec {
  int k = 1;
  double step = 2.0 * M_PI;

  void validate() const {
    if (k < 1) throw std::invalid_argument("CoverSpec: k >= 1 required");
    if (!(step > 0.0)) throw std::invalid_argument("CoverSpec: positive translation step required");
  }

  static CoverSpec circle_cover(int k) { return {k, 2.0 * M_PI * k}; }
};

/// The vertical FIO kernel of the family, K(p, q) = int e^{i (p-q) zeta} f(zeta) d zeta,
/// evaluated in closed form (no quadrature).
inline std::complex<double> kernel_from_symbol(const SchwartzFamily& f, double p, double q) {
  f.validate();
  return f.fourier(p - q);
}

namespace detail {

/// Number of lattice terms needed so the dropped Gaussian tail of
/// sum_n |K(u + n step)| is certified below `tol`: geometric majorant of
/// the Gaussian beyond the last kept translate.
inline long pushdown_truncation(const SchwartzFamily& f, double u, double step, double tol) {
  double amp = f.integral();
  for (long N = 2; N < 4000; ++N) {
    // for |n| > N: |K| <= amp exp(-s^2 (n step - |u| - |center|)^2 / 2), summed geometrically
    double d = N * step - std::abs(u) - std::abs(f.center);
    if (d <= step) continue;
    double s2 = f.scale * f.scale;
    double first = amp * std::exp(-0.5 * s2 * d * d);
    double ratio = std::exp(-0.5 * s2 * (2.0 * d * step + step * step));
    double bound = 2.0 * first / (1.0 - std::min(0.999, ratio));
    if (bound < tol) return N;
  }
  throw std::runtime_error("pushdown_truncation: tail bound unachievable within budget");
}

}  // namespace detail

/// Push-down of the kernel to the quotient: K(p-bar, q-bar) = sum_gamma K(p, q + gamma),
/// truncated with a certified Gaussian tail bound below tol.
inline std::complex<double> pushdown_sum(const SchwartzFamily& f, const CoverSpec& cover, double p,
                                         double q, double tol = 1e-13) {
  f.validate();
  cover.validate();
  long N = detail::pushdown_truncation(f, p - q, cover.step, tol);
  std::complex<double> acc = 0.0;
  for (long n = -N; n <= N; ++n) acc += kernel_from_symbol(f, p, q + n * cover.step);
  return acc;
}

/// The pushed-down kernel tabulated on the quotient fiber pairs of the
/// k-fold circle cover (for k = 2 this is the four-value table that the
/// Z_2-invariance collapses to two), with the truncation radius and the
/// certified tail bound that produced it. G-invariance holds by
/// construction: values depend only on quotient classes.
struct PushdownKernel {
  std::vector<std::vector<std::complex<double>>> values;  // k x k quotient pairs
  long truncation_radius = 0;
  double tail_bound = 0.0;
};

inline PushdownKernel pushdown_kernel(const SchwartzFamily& f, const CoverSpec& cover,
                                      double base_point = 0.0, double tol = 1e-13) {
  f.validate();
  cover.validate();
  PushdownKernel K;
  K.tail_bound = tol;
  K.values.assign(cover.k, std::vector<std::complex<double>>(cover.k));
  for (int i = 0; i < cover.k; ++i)
    for (int j = 0; j < cover.k; ++j) {
      double p = base_point + 2.0 * M_PI * i;
      double q = base_point + 2.0 * M_PI * j;
      K.truncation_radius =
          std::max(K.truncation_radius, detail::pushdown_truncation(f, p - q, cover.step, tol));
      K.values[i][j] = pushdown_sum(f, cover, p, q, tol);
    }
  return K;
}

/// Vertical trace of the pushed-down family over the quotient fiber of the
/// k-fold circle cover: sum over the k quotient points of the diagonal
/// push-down kernel; equals k sum_n F(f)(2 pi k n).
inline std::complex<double> vertical_trace_cover(const SchwartzFamily& f, const CoverSpec& cover,
                                                 double base_point = 0.0, double tol = 1e-13) {
  f.validate();
  cover.validate();
  std::complex<double> acc = 0.0;
  for (int j = 0; j < cover.k; ++j) {
    double p = base_point + 2.0 * M_PI * j;
    acc += pushdown_sum(f, cover, p, p, tol);
  }
  return acc;
}

/// Root-of-unity resolution of the same trace:
/// k sum_n F(f)(2 pi k n) = sum_{j=0}^{k-1} sum_m e^{2 pi i m j / k} F(f)(2 pi m).
inline std::complex<double> vertical_trace_cover_roots(const SchwartzFamily& f, int k,
                                                       double tol = 1e-13) {
  f.validate();
  long N = detail::pushdown_truncation(f, 0.0, 2.0 * M_PI, tol);
  std::complex<double> acc = 0.0;
  for (int j = 0; j < k; ++j)
    for (long m = -N; m <= N; ++m)
      acc += std::exp(std::complex<double>(0.0, 2.0 * M_PI * m * j / k)) * f.fourier(2.0 * M_PI * m);
  return acc;
}

/// Residual of the smoothed classical Poisson summation formula
/// sum_n f(n) = sum_k F(f)(2 pi k), both sides with certified tails.
inline double classical_poisson_check(const SchwartzFamily& f, double tol = 1e-14) {
  f.validate();
  // left side: f decays like a Gaussian in n
  double lhs = 0.0;
  {
    double s = f.scale;
    long N = 2;
    while (f.value(f.center + N) + f.value(f.center - N) > tol * 0.01 && N < 1000000) ++N;
    N += long(4.0 * s) + 4;
    for (long n = -N; n <= N; ++n) lhs += f.value(double(n));
  }
  std::complex<double> rhs = 0.0;
  {
    long N = detail::pushdown_truncation(f, 0.0, 2.0 * M_PI, tol);
    for (long k = -N; k <= N; ++k) rhs += f.fourier(2.0 * M_PI * k);
  }
  return std::abs(lhs - rhs);
}

}  // namespace vertrace

#endif
