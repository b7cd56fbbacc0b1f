#ifndef VERTRACE_SPECTRAL_HPP
#define VERTRACE_SPECTRAL_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace vertrace {

/// Eigen-decomposition of a Hermitian matrix into distinct eigenvalue
/// clusters with orthogonal projectors. Evaluation basis for the residue
/// calculus in the functional calculus.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;            // cluster representatives, ascending
  std::vector<Eigen::MatrixXcd> projectors;   // idempotent, mutually orthogonal, sum to I

  size_t size() const { return eigenvalues.size(); }

  Eigen::MatrixXcd reconstruct() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(projectors[0].rows(), projectors[0].cols());
    for (size_t g = 0; g < size(); ++g) m += eigenvalues[g] * projectors[g];
    return m;
  }

  /// f(P) = sum f(lambda_g) Pi_g for a scalar function on the spectrum.
  template <class F>
  Eigen::MatrixXcd apply(F&& f) const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(projectors[0].rows(), projectors[0].cols());
    for (size_t g = 0; g < size(); ++g) m += f(eigenvalues[g]) * projectors[g];
    return m;
  }
};

inline SpectralDecomposition spectral_decomposition(const Eigen::MatrixXcd& P, double cluster_tol = 1e-9) {
  if (P.rows() != P.cols()) throw std::invalid_argument("spectral_decomposition: square matrix required");
  if ((P - P.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, P.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("spectral_decomposition: Hermitian matrix required");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(P);
  if (es.info() != Eigen::Success) throw std::runtime_error("spectral_decomposition: eigensolver failed");
  const auto& lam = es.eigenvalues();
  const auto& V = es.eigenvectors();
  double scale = std::max(1.0, std::abs(lam(lam.size() - 1)));

  SpectralDecomposition sd;
  int n = int(lam.size());
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && lam(j + 1) - lam(i) < cluster_tol * scale) ++j;
    double rep = 0.0;
    Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(n, n);
    for (int k = i; k <= j; ++k) {
      rep += lam(k);
      proj += V.col(k) * V.col(k).adjoint();
    }
    sd.eigenvalues.push_back(rep / (j - i + 1));
    sd.projectors.push_back(std::move(proj));
    i = j + 1;
  }
  return sd;
}

}  // namespace vertrace

#endif
