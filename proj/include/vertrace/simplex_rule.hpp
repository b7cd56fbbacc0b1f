#ifndef VERTRACE_SIMPLEX_RULE_HPP
#define VERTRACE_SIMPLEX_RULE_HPP

#include <cmath>
#include <utility>
#include <vector>

namespace vertrace {

/// Grundmann-Moller symmetric quadrature of index s on the standard simplex
/// T_n = {x in R^n : x_i >= 0, sum x_i <= 1}; exact for polynomials of
/// degree <= 2s+1. Returns (point, weight) pairs; weights sum to 1/n!.
inline std::vector<std::pair<std::vector<double>, double>> grundmann_moeller(int n, int s) {
  std::vector<std::pair<std::vector<double>, double>> rule;
  for (int i = 0; i <= s; ++i) {
    const int d = 2 * s + n + 1 - 2 * i;
    // coefficient (-1)^i 2^{-2s} d^{2s+1} / (i! (2s + n + 1 - i)!)
    double c = (i % 2 ? -1.0 : 1.0) * std::pow(2.0, -2.0 * s) * std::pow(double(d), 2 * s + 1);
    for (int t = 2; t <= i; ++t) c /= t;
    for (int t = 2; t <= 2 * s + n + 1 - i; ++t) c /= t;
    // enumerate beta in N^{n+1} with |beta| = s - i; cartesian point x_j = (2 beta_j + 1)/d, j = 1..n
    std::vector<int> beta(n + 1, 0);
    beta[0] = s - i;
    while (true) {
      // emit current beta
      std::vector<double> x(n);
      for (int j = 0; j < n; ++j) x[j] = (2.0 * beta[j + 1] + 1.0) / d;
      rule.emplace_back(std::move(x), c);
      // next composition of rem into n+1 parts (colex)
      int k = 0;
      while (k < n && beta[k] == 0) ++k;
      if (k == n) break;
      int v = beta[k];
      beta[k] = 0;
      beta[0] = v - 1;
      beta[k + 1] += 1;
    }
  }
  return rule;
}

/// Integrate a vector-space-valued functional over T_n with the GM rule.
/// V needs operator+ and scalar multiply via axpy callback.
template <class F, class V>
V gm_integrate(int n, int s, const F& f, const V& zero) {
  auto rule = grundmann_moeller(n, s);
  V acc = zero;
  for (const auto& [x, w] : rule) acc = acc + w * f(x);
  return acc;
}

}  // namespace vertrace

#endif
