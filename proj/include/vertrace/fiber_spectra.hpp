#ifndef VERTRACE_FIBER_SPECTRA_HPP
#define VERTRACE_FIBER_SPECTRA_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "vertrace/trig_poly.hpp"

namespace vertrace {

/// Sorted eigenvalues with multiplicities, complete below the cutoff.
struct SpectrumEntry {
  std::vector<double> values;
  std::vector<int> multiplicities;
  double cutoff = 0.0;

  size_t count_below(double lam) const {
    size_t n = 0;
    for (size_t i = 0; i < values.size() && values[i] <= lam; ++i) n += multiplicities[i];
    return n;
  }
};

/// Sorted closed-geodesic lengths with multiplicities below the cutoff.
struct LengthEntry {
  std::vector<double> lengths;
  std::vector<int> multiplicities;
  double cutoff = 0.0;
};

struct SpectrumTable {
  std::vector<double> base_grid;
  std::vector<SpectrumEntry> entries;
};

struct GeodesicLengthTable {
  std::vector<double> base_grid;
  std::vector<LengthEntry> entries;
};

namespace detail {

inline void push_sorted_with_multiplicity(std::vector<double>& vals, std::vector<int>& mult,
                                          std::vector<double> raw, double rel_tol = 1e-9) {
  std::sort(raw.begin(), raw.end());
  for (double v : raw) {
    if (!vals.empty() && std::abs(v - vals.back()) <= rel_tol * std::max(1.0, std::abs(v)))
      ++mult.back();
    else {
      vals.push_back(v);
      mult.push_back(1);
    }
  }
}

}  // namespace detail

/// Total length of the metric circle: L = int_0^{2pi} w^{-1/2} dx by
/// periodic trapezoid with grid doubling (spectrally accurate).
template <class C>
double circle_length(const TrigPoly<C>& w) {
  auto eval = [&](int nx) {
    double L = 0.0;
    for (int i = 0; i < nx; ++i) {
      double wv = w.eval(2.0 * M_PI * i / nx).real();
      if (!(wv > 0.0)) throw std::invalid_argument("circle_length: nonpositive w sample");
      L += 1.0 / std::sqrt(wv);
    }
    return L * 2.0 * M_PI / nx;
  };
  int nx = 64;
  double prev = eval(nx);
  for (int it = 0; it < 12; ++it) {
    nx *= 2;
    double cur = eval(nx);
    if (std::abs(cur - prev) < 1e-13 * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

/// Exact 1-d reduction: every metric circle is isometric to the flat circle
/// of its length, so lambda_n = (2 pi n / L)^2 with multiplicity 2 for n >= 1.
template <class C>
SpectrumEntry circle_spectrum(const TrigPoly<C>& w, double cutoff) {
  double L = circle_length(w);
  SpectrumEntry e;
  e.cutoff = cutoff;
  e.values.push_back(0.0);
  e.multiplicities.push_back(1);
  double base = 2.0 * M_PI / L;
  for (int n = 1; double(base * n) * double(base * n) <= cutoff; ++n) {
    e.values.push_back(base * n * base * n);
    e.multiplicities.push_back(2);
  }
  return e;
}

template <class C>
LengthEntry circle_lengths(const TrigPoly<C>& w, double length_cutoff) {
  double L = circle_length(w);
  LengthEntry e;
  e.cutoff = length_cutoff;
  for (int n = 1; n * L <= length_cutoff; ++n) {
    e.lengths.push_back(n * L);
    e.multiplicities.push_back(2);  // both orientations
  }
  return e;
}

enum class CircleDiscretization { FiniteDifference, Fourier };

/// Independent numeric oracle: symmetric discretization of
/// Delta = -w d^2 - (w'/2) d in L^2(w^{-1/2} dx) and dense Hermitian
/// eigensolve. O(h^2) for the finite-difference stencil, spectral accuracy
/// for the Fourier-Galerkin variant.
template <class C>
std::vector<double> circle_spectrum_numeric(const TrigPoly<C>& w, int grid_size, int count,
                                            CircleDiscretization method = CircleDiscretization::FiniteDifference) {
  if (grid_size < 8 * count)
    throw std::invalid_argument("circle_spectrum_numeric: grid_size >= 8*count required");
  if (method == CircleDiscretization::FiniteDifference) {
    // quadratic form int w^{1/2} f' g' dx against mass int w^{-1/2} f g dx,
    // lumped mass, periodic second-difference stencil
    int n = grid_size;
    double h = 2.0 * M_PI / n;
    Eigen::VectorXd whalf_mid(n), mass(n);
    for (int i = 0; i < n; ++i) {
      whalf_mid(i) = std::sqrt(w.eval((i + 0.5) * h).real());
      mass(i) = std::pow(w.eval(i * h).real(), -0.5) * h;
    }
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      int j = (i + 1) % n;
      double k = whalf_mid(i) / h;
      K(i, i) += k;
      K(j, j) += k;
      K(i, j) -= k;
      K(j, i) -= k;
    }
    Eigen::VectorXd mi = mass.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd A = mi.asDiagonal() * K * mi.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + count);
    return out;
  }
  // Fourier-Galerkin: modes -K..K with weighted stiffness/mass Gram matrices
  int K = grid_size / 2;
  int n = 2 * K + 1;
  int nq = 8 * n;
  std::vector<double> wroot(nq);
  for (int i = 0; i < nq; ++i) wroot[i] = std::sqrt(w.eval(2.0 * M_PI * i / nq).real());
  auto fourier_row = [&](bool inverse) {
    std::vector<std::complex<double>> coef(2 * n - 1);
    for (int m = -(n - 1); m <= n - 1; ++m) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < nq; ++i) {
        double x = 2.0 * M_PI * i / nq;
        acc += (inverse ? 1.0 / wroot[i] : wroot[i]) * std::exp(std::complex<double>(0.0, -m * x));
      }
      coef[m + n - 1] = acc / double(nq);
    }
    return coef;
  };
  auto gc = fourier_row(false);
  auto hc = fourier_row(true);
  Eigen::MatrixXcd A(n, n), B(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int j = a - K, k = b - K;
      A(a, b) = double(j) * double(k) * gc[(j - k) + n - 1];
      B(a, b) = hc[(j - k) + n - 1];
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, B);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + count);
  return out;
}

/// Flat-torus lattice data: basis columns v1, v2.
struct TorusBasis {
  std::array<double, 2> v1{1.0, 0.0};
  std::array<double, 2> v2{0.0, 1.0};

  double det() const { return v1[0] * v2[1] - v1[1] * v2[0]; }
  double covolume() const { return std::abs(det()); }

  void validate() const {
    if (std::abs(det()) < 1e-12) throw std::invalid_argument("TorusBasis: basis not independent");
  }

  std::array<std::array<double, 2>, 2> dual() const {
    double d = det();
    // rows of V^{-1}: u_i . v_j = delta_ij
    return {{{v2[1] / d, -v2[0] / d}, {-v1[1] / d, v1[0] / d}}};
  }
};

/// Eigenvalues 4 pi^2 |m*|^2 over the dual lattice, complete below the
/// cutoff: bounding box |m_i| <= R |v_i| from Cauchy-Schwarz, so no lattice
/// point below the cutoff is missed.
inline SpectrumEntry torus_spectrum(const TorusBasis& basis, double cutoff) {
  basis.validate();
  auto u = basis.dual();
  double rstar = std::sqrt(cutoff) / (2.0 * M_PI);
  auto norm = [](const std::array<double, 2>& v) { return std::hypot(v[0], v[1]); };
  long b1 = long(std::floor(rstar * norm(basis.v1))) + 1;
  long b2 = long(std::floor(rstar * norm(basis.v2))) + 1;
  if (b1 * b2 > 40'000'000L) throw std::invalid_argument("torus_spectrum: cutoff too large for enumeration budget");
  std::vector<double> raw;
  for (long m1 = -b1; m1 <= b1; ++m1)
    for (long m2 = -b2; m2 <= b2; ++m2) {
      double x = m1 * u[0][0] + m2 * u[1][0];
      double y = m1 * u[0][1] + m2 * u[1][1];
      double lam = 4.0 * M_PI * M_PI * (x * x + y * y);
      if (lam <= cutoff) raw.push_back(lam);
    }
  SpectrumEntry e;
  e.cutoff = cutoff;
  detail::push_sorted_with_multiplicity(e.values, e.multiplicities, std::move(raw));
  return e;
}

/// Closed-geodesic lengths |m1 v1 + m2 v2| below the cutoff, same
/// bounding-box completeness argument with the dual basis.
inline LengthEntry torus_lengths(const TorusBasis& basis, double length_cutoff) {
  basis.validate();
  auto u = basis.dual();
  auto norm = [](const std::array<double, 2>& v) { return std::hypot(v[0], v[1]); };
  long b1 = long(std::floor(length_cutoff * norm({u[0][0], u[0][1]}))) + 1;
  long b2 = long(std::floor(length_cutoff * norm({u[1][0], u[1][1]}))) + 1;
  if (b1 * b2 > 40'000'000L) throw std::invalid_argument("torus_lengths: cutoff too large for enumeration budget");
  std::vector<double> raw;
  for (long m1 = -b1; m1 <= b1; ++m1)
    for (long m2 = -b2; m2 <= b2; ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      double x = m1 * basis.v1[0] + m2 * basis.v2[0];
      double y = m1 * basis.v1[1] + m2 * basis.v2[1];
      double len = std::hypot(x, y);
      if (len <= length_cutoff) raw.push_back(len);
    }
  LengthEntry e;
  e.cutoff = length_cutoff;
  detail::push_sorted_with_multiplicity(e.lengths, e.multiplicities, std::move(raw));
  return e;
}

/// Family of metric circles over a base grid.
struct MetricCircleFamily {
  std::function<TrigQ(double)> w_of_b;
  std::vector<double> base_grid;

  SpectrumTable spectrum_table(double cutoff) const {
    SpectrumTable t;
    t.base_grid = base_grid;
    for (double b : base_grid) t.entries.push_back(circle_spectrum(w_of_b(b), cutoff));
    return t;
  }
  GeodesicLengthTable length_table(double cutoff) const {
    GeodesicLengthTable t;
    t.base_grid = base_grid;
    for (double b : base_grid) t.entries.push_back(circle_lengths(w_of_b(b), cutoff));
    return t;
  }
};

struct FlatTorusFamily {
  std::function<TorusBasis(double)> basis_of_b;
  std::vector<double> base_grid;

  SpectrumTable spectrum_table(double cutoff) const {
    SpectrumTable t;
    t.base_grid = base_grid;
    for (double b : base_grid) t.entries.push_back(torus_spectrum(basis_of_b(b), cutoff));
    return t;
  }
  GeodesicLengthTable length_table(double cutoff) const {
    GeodesicLengthTable t;
    t.base_grid = base_grid;
    for (double b : base_grid) t.entries.push_back(torus_lengths(basis_of_b(b), cutoff));
    return t;
  }
};

/// Continuity check across the base grid: the n-th shortest length must move
/// by at most slack * |change| expected from neighbors; returns the indices
/// of flagged (b-step, track) pairs. Degenerate track crossings are flagged,
/// not resolved.
inline std::vector<std::pair<size_t, size_t>> length_track_jumps(const GeodesicLengthTable& table,
                                                                 double max_step,
                                                                 size_t max_tracks = SIZE_MAX) {
  std::vector<std::pair<size_t, size_t>> flagged;
  for (size_t i = 0; i + 1 < table.entries.size(); ++i) {
    size_t tracks = std::min({table.entries[i].lengths.size(),
                              table.entries[i + 1].lengths.size(), max_tracks});
    for (size_t k = 0; k < tracks; ++k)
      if (std::abs(table.entries[i + 1].lengths[k] - table.entries[i].lengths[k]) > max_step)
        flagged.push_back({i, k});
  }
  return flagged;
}

}  // namespace vertrace

#endif
