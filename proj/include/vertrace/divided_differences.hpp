#ifndef VERTRACE_DIVIDED_DIFFERENCES_HPP
#define VERTRACE_DIVIDED_DIFFERENCES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace vertrace {

// Analytic integrands for the residue calculus. Each provides derivatives of
// any order at points of the positive real axis; deriv(0, x) is the value.

/// f(lambda) = lambda^p, principal branch (spectra here are positive reals).
struct PowerFn {
  std::complex<double> p;
  std::complex<double> deriv(int k, double x) const {
    std::complex<double> c = 1.0;
    for (int t = 0; t < k; ++t) c *= (p - double(t));
    return c * std::pow(std::complex<double>(x, 0.0), p - double(k));
  }
};

/// f(lambda) = exp(a * lambda).
struct ExpFn {
  std::complex<double> a;
  std::complex<double> deriv(int k, double x) const {
    return std::pow(a, k) * std::exp(a * x);
  }
};

/// Confluent divided difference f[z_0, ..., z_{n-1}] over a node multiset.
/// Repeated nodes are resolved through derivatives (Hermite tableau); nodes
/// must compare exactly equal to count as repeats, which holds here because
/// they are shared cluster representatives.
template <class F>
std::complex<double> divided_difference(const F& f, std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const int n = int(z.size());
  std::vector<std::complex<double>> col(n);
  std::vector<double> fact(n + 1, 1.0);
  for (int k = 1; k <= n; ++k) fact[k] = fact[k - 1] * k;
  for (int i = 0; i < n; ++i) col[i] = f.deriv(0, z[i]);
  for (int k = 1; k < n; ++k) {
    for (int i = 0; i + k < n; ++i) {
      if (z[i + k] == z[i])
        col[i] = f.deriv(k, z[i]) / fact[k];
      else
        col[i] = (col[i + 1] - col[i]) / (z[i + k] - z[i]);
    }
  }
  return col[0];
}

}  // namespace vertrace

#endif
