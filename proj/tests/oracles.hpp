// Test-only oracles, independent of the implementation paths they check.
#ifndef VERTRACE_TESTS_ORACLES_HPP
#define VERTRACE_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "vertrace/graded_form.hpp"

namespace oracles {

using vertrace::GradedFormC;
using vertrace::koszul_sign;
using vertrace::MultiIndex;
using cplx = std::complex<double>;

/// Left-multiplication representation of Lambda(R^beta) (x) End(C^N) on
/// ungraded matrices of size 2^beta * N: db_I acts on the exterior algebra
/// by wedge from the left; matrix blocks act on C^N. Faithful algebra
/// homomorphism, so matrix functions of the flattened operator are the
/// ground truth for the graded functional calculus.
inline Eigen::MatrixXcd flatten(const GradedFormC& x) {
  const int beta = x.beta();
  const int n = x.dim();
  const int masks = 1 << beta;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(masks * n, masks * n);
  for (const auto& [I, A] : x.terms()) {
    for (int k = 0; k < masks; ++k) {
      int sg = koszul_sign(I.mask(), std::uint32_t(k));
      if (sg == 0) continue;
      int row_mask = int(I.mask()) | k;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(row_mask * n + i, k * n + j) += double(sg) * A(i, j);
    }
  }
  return out;
}

inline Eigen::MatrixXcd flat_heat(const Eigen::MatrixXcd& q, double t) {
  return (-t * q).exp();
}

/// Principal square root by Schur (Eigen), then scaling-and-squaring exp.
inline Eigen::MatrixXcd flat_wave_sqrt(const Eigen::MatrixXcd& q, double t) {
  Eigen::MatrixXcd s = q.sqrt();
  return (cplx(0.0, -t) * s).exp();
}

inline Eigen::MatrixXcd flat_root(const Eigen::MatrixXcd& q, int m) {
  return q.pow(1.0 / double(m));
}

inline int rank_oracle(const Eigen::MatrixXcd& a, double tol = 1e-10) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol * svd.singularValues()(0)) ++r;
  return a.size() == 0 ? 0 : r;
}

/// Random Hermitian positive definite with well-separated spectrum.
inline Eigen::MatrixXcd random_posdef(std::mt19937_64& rng, int n, double lo = 0.5, double hi = 4.0) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd u = qr.householderQ();
  Eigen::VectorXd lam(n);
  for (int i = 0; i < n; ++i) lam(i) = lo + (hi - lo) * (i + 0.3 * std::abs(g(rng))) / double(n);
  return u * lam.asDiagonal() * u.adjoint();
}

inline GradedFormC random_qplus(std::mt19937_64& rng, int beta, int np, int nm, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GradedFormC q(beta, np, nm);
  int n = np + nm;
  for (std::uint32_t mask = 1; mask < (1u << beta); ++mask) {
    vertrace::MatC A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = scale * cplx(u(rng), u(rng));
    q.add_term(MultiIndex(mask), A);
  }
  return q;
}

}  // namespace oracles

#endif
