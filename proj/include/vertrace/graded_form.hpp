#ifndef VERTRACE_GRADED_FORM_HPP
#define VERTRACE_GRADED_FORM_HPP

#include <map>
#include <stdexcept>

#include "vertrace/matrix.hpp"
#include "vertrace/multi_index.hpp"
#include "vertrace/rational.hpp"

namespace vertrace {

/// Element of Lambda(R^beta) (x) End(C^{np} (+) C^{nm}): a finite sum of
/// terms db_I * A_I with A_I an (np+nm)-square matrix. This is the
/// finite-dimensional avatar of a mixed-form-degree vertical operator
/// Q = Q_[0] + ... + Q_[dim B]. Forms are central: (db_I A)(db_J B) =
/// (db_I ^ db_J)(A B), Koszul sign from reordering the db's only.
template <class S>
class GradedForm {
 public:
  using Scalar = S;

  GradedForm() = default;
  GradedForm(int beta, int np, int nm) : beta_(beta), np_(np), nm_(nm) {
    if (beta < 0 || beta > kMaxBaseDim) throw std::invalid_argument("GradedForm: beta must be in 0..8");
    if (np < 0 || nm < 0 || np + nm == 0) throw std::invalid_argument("GradedForm: bad block sizes");
  }

  static GradedForm identity(int beta, int np, int nm) {
    GradedForm g(beta, np, nm);
    g.set_term(MultiIndex(), Mat<S>::identity(np + nm));
    return g;
  }

  static GradedForm monomial(int beta, int np, int nm, MultiIndex I, Mat<S> A) {
    GradedForm g(beta, np, nm);
    g.set_term(I, std::move(A));
    return g;
  }

  int beta() const { return beta_; }
  int plus_dim() const { return np_; }
  int minus_dim() const { return nm_; }
  int dim() const { return np_ + nm_; }
  const std::map<MultiIndex, Mat<S>>& terms() const { return terms_; }

  bool compatible(const GradedForm& o) const {
    return beta_ == o.beta_ && np_ == o.np_ && nm_ == o.nm_;
  }

  void set_term(MultiIndex I, Mat<S> A) {
    check_index(I);
    if (A.rows() != dim() || A.cols() != dim()) throw std::invalid_argument("GradedForm: term size mismatch");
    if (A.is_zero())
      terms_.erase(I);
    else
      terms_[I] = std::move(A);
  }

  void add_term(MultiIndex I, const Mat<S>& A) {
    check_index(I);
    auto it = terms_.find(I);
    if (it == terms_.end()) {
      if (!A.is_zero()) terms_.emplace(I, A);
    } else {
      it->second = it->second + A;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Mat<S> term(MultiIndex I) const {
    auto it = terms_.find(I);
    return it == terms_.end() ? Mat<S>(dim(), dim()) : it->second;
  }

  /// Exact extraction of the form-degree-d part.
  GradedForm degree_part(int d) const {
    GradedForm g(beta_, np_, nm_);
    for (const auto& [I, A] : terms_)
      if (I.degree() == d) g.terms_.emplace(I, A);
    return g;
  }

  int max_degree() const {
    int d = 0;
    for (const auto& [I, A] : terms_) d = std::max(d, I.degree());
    return d;
  }

  bool is_zero() const { return terms_.empty(); }

  double max_abs() const {
    double m = 0.0;
    for (const auto& [I, A] : terms_) m = std::max(m, A.max_abs());
    return m;
  }

  friend GradedForm operator+(const GradedForm& a, const GradedForm& b) {
    require_compatible(a, b);
    GradedForm r = a;
    for (const auto& [I, A] : b.terms_) r.add_term(I, A);
    return r;
  }
  friend GradedForm operator-(const GradedForm& a, const GradedForm& b) {
    return a + (scalar_ops<S>::from_int(-1) * b);
  }
  friend GradedForm operator*(const S& s, const GradedForm& a) {
    GradedForm r(a.beta_, a.np_, a.nm_);
    for (const auto& [I, A] : a.terms_) r.add_term(I, s * A);
    return r;
  }

 private:
  static void require_compatible(const GradedForm& a, const GradedForm& b) {
    if (!a.compatible(b)) throw std::invalid_argument("GradedForm: dimension mismatch");
  }
  void check_index(MultiIndex I) const {
    if (I.mask() >> beta_) throw std::invalid_argument("GradedForm: multi-index label exceeds beta");
  }

  int beta_ = 0, np_ = 1, nm_ = 0;
  std::map<MultiIndex, Mat<S>> terms_;
};

/// Product in Lambda(R^beta) (x) End: bilinear, Koszul sign from reordering
/// multi-indices, matrix factors multiply in order.
template <class S>
GradedForm<S> wedge_compose(const GradedForm<S>& a, const GradedForm<S>& b) {
  if (!a.compatible(b)) throw std::invalid_argument("wedge_compose: dimension mismatch");
  GradedForm<S> r(a.beta(), a.plus_dim(), a.minus_dim());
  for (const auto& [I, A] : a.terms()) {
    for (const auto& [J, B] : b.terms()) {
      int sg = koszul_sign(I.mask(), J.mask());
      if (sg == 0) continue;
      Mat<S> AB = A * B;
      if (sg < 0) AB = scalar_ops<S>::from_int(-1) * AB;
      r.add_term(MultiIndex(I.mask() | J.mask()), AB);
    }
  }
  return r;
}

template <class S>
GradedForm<S> operator*(const GradedForm<S>& a, const GradedForm<S>& b) {
  return wedge_compose(a, b);
}

/// Supertrace per multi-index: tr over the C^{np} block minus tr over C^{nm}.
template <class S>
std::map<MultiIndex, S> supertrace(const GradedForm<S>& x) {
  std::map<MultiIndex, S> out;
  for (const auto& [I, A] : x.terms()) {
    S t = scalar_ops<S>::zero();
    for (int i = 0; i < x.plus_dim(); ++i) t = t + A(i, i);
    for (int i = x.plus_dim(); i < x.dim(); ++i) t = t - A(i, i);
    if (!scalar_ops<S>::is_zero(t)) out[I] = t;
  }
  return out;
}

namespace detail {

// Split a matrix into block-diagonal (even) and block-off-diagonal (odd)
// parts with respect to the C^{np} (+) C^{nm} grading.
template <class S>
void parity_split(const GradedForm<S>& x, const Mat<S>& A, Mat<S>& even, Mat<S>& odd) {
  int np = x.plus_dim(), n = x.dim();
  even = Mat<S>(n, n);
  odd = Mat<S>(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      bool diag_block = (i < np) == (j < np);
      (diag_block ? even : odd)(i, j) = A(i, j);
    }
}

}  // namespace detail

/// Whether every term has the given total parity (form degree + matrix
/// parity mod 2). Terms with mixed matrix parity fail.
template <class S>
bool has_pure_parity(const GradedForm<S>& x, int parity) {
  for (const auto& [I, A] : x.terms()) {
    Mat<S> even, odd;
    detail::parity_split(x, A, even, odd);
    if (!even.is_zero() && (I.degree() % 2) != parity) return false;
    if (!odd.is_zero() && ((I.degree() + 1) % 2) != parity) return false;
  }
  return true;
}

/// Supercommutator [X,Y]: per homogeneous pieces x = db_I A, y = db_J B
/// (A, B of pure matrix block parity) the convention forced by
/// Str-cyclicity in this algebra is [x,y] = xy - (-1)^{|I||J|+p(A)p(B)} yx,
/// which collapses to sgn(I,J) db_K (AB - (-1)^{p(A)p(B)} BA).
template <class S>
GradedForm<S> graded_commutator(const GradedForm<S>& x, const GradedForm<S>& y) {
  if (!x.compatible(y)) throw std::invalid_argument("graded_commutator: dimension mismatch");
  GradedForm<S> r(x.beta(), x.plus_dim(), x.minus_dim());
  const S minus_one = scalar_ops<S>::from_int(-1);
  for (const auto& [I, A] : x.terms()) {
    Mat<S> Ae, Ao;
    detail::parity_split(x, A, Ae, Ao);
    for (const auto& [J, B] : y.terms()) {
      int sgIJ = koszul_sign(I.mask(), J.mask());
      if (sgIJ == 0) continue;
      Mat<S> Be, Bo;
      detail::parity_split(y, B, Be, Bo);
      MultiIndex K(I.mask() | J.mask());
      const Mat<S>* as[2] = {&Ae, &Ao};
      const Mat<S>* bs[2] = {&Be, &Bo};
      for (int pa = 0; pa < 2; ++pa)
        for (int pb = 0; pb < 2; ++pb) {
          if (as[pa]->is_zero() || bs[pb]->is_zero()) continue;
          Mat<S> c = (*as[pa]) * (*bs[pb]);
          Mat<S> d = (*bs[pb]) * (*as[pa]);
          c = (pa * pb) % 2 ? c + d : c - d;
          if (sgIJ < 0) c = minus_one * c;
          r.add_term(K, c);
        }
    }
  }
  return r;
}

/// delta_t rescaling on forms: the degree-j term is scaled by t^{-j}.
template <class S>
GradedForm<S> delta_t_rescale(const GradedForm<S>& x, const S& t) {
  if (scalar_ops<S>::is_zero(t)) throw std::invalid_argument("delta_t_rescale: t must be nonzero");
  GradedForm<S> r(x.beta(), x.plus_dim(), x.minus_dim());
  const S one = scalar_ops<S>::one();
  for (const auto& [I, A] : x.terms()) {
    S f = one;
    for (int j = 0; j < I.degree(); ++j) f = f / t;
    r.add_term(I, f * A);
  }
  return r;
}

/// Conjugation variant t * delta_t * x * delta_t^{-1}: degree-k operator
/// terms scale by t^{-k+1}.
template <class S>
GradedForm<S> delta_t_conjugate(const GradedForm<S>& x, const S& t) {
  if (scalar_ops<S>::is_zero(t)) throw std::invalid_argument("delta_t_conjugate: t must be nonzero");
  GradedForm<S> r(x.beta(), x.plus_dim(), x.minus_dim());
  const S one = scalar_ops<S>::one();
  for (const auto& [I, A] : x.terms()) {
    S f = t;
    for (int j = 0; j < I.degree(); ++j) f = f / t;
    r.add_term(I, f * A);
  }
  return r;
}

using GradedFormC = GradedForm<std::complex<double>>;
using GradedFormQ = GradedForm<CRat>;

}  // namespace vertrace

#endif
