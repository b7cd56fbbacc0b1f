#ifndef VERTRACE_MATRIX_HPP
#define VERTRACE_MATRIX_HPP

#include <cassert>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "vertrace/rational.hpp"

namespace vertrace {

/// Minimal dense matrix over a generic scalar (complex<double> or CRat).
/// Row-major; only the operations the graded algebra needs.
template <class S>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols, scalar_ops<S>::zero()) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = scalar_ops<S>::one();
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  S& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  const S& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  friend Mat operator+(const Mat& x, const Mat& y) {
    assert(x.rows_ == y.rows_ && x.cols_ == y.cols_);
    Mat r = x;
    for (size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = r.a_[k] + y.a_[k];
    return r;
  }
  friend Mat operator-(const Mat& x, const Mat& y) {
    assert(x.rows_ == y.rows_ && x.cols_ == y.cols_);
    Mat r = x;
    for (size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = r.a_[k] - y.a_[k];
    return r;
  }
  friend Mat operator*(const S& s, const Mat& x) {
    Mat r = x;
    for (auto& v : r.a_) v = s * v;
    return r;
  }
  friend Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols_ != y.rows_) throw std::invalid_argument("Mat: dimension mismatch in product");
    Mat r(x.rows_, y.cols_);
    for (int i = 0; i < x.rows_; ++i)
      for (int k = 0; k < x.cols_; ++k) {
        const S& xik = x(i, k);
        if (scalar_ops<S>::is_zero(xik)) continue;
        for (int j = 0; j < y.cols_; ++j) r(i, j) += xik * y(k, j);
      }
    return r;
  }

  S trace() const {
    S t = scalar_ops<S>::zero();
    for (int i = 0; i < rows_ && i < cols_; ++i) t = t + (*this)(i, i);
    return t;
  }

  bool is_zero() const {
    for (const auto& v : a_)
      if (!scalar_ops<S>::is_zero(v)) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : a_) m = std::max(m, scalar_ops<S>::abs(v));
    return m;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<S> a_;
};

using MatC = Mat<std::complex<double>>;

inline Eigen::MatrixXcd to_eigen(const MatC& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline MatC from_eigen(const Eigen::MatrixXcd& e) {
  MatC m(int(e.rows()), int(e.cols()));
  for (int i = 0; i < e.rows(); ++i)
    for (int j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

}  // namespace vertrace

#endif
