#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "vertrace/graded_family.hpp"
#include "vertrace/graded_form.hpp"

using namespace vertrace;
using C = std::complex<double>;

namespace {

Mat<CRat> rat_mat_1x1(long num, long den = 1) {
  Mat<CRat> m(1, 1);
  m(0, 0) = CRat(Rational(num, den));
  return m;
}

GradedFormQ random_rational_form(std::mt19937_64& rng, int beta, int np, int nm, int max_deg) {
  std::uniform_int_distribution<long> num(-6, 6);
  GradedFormQ g(beta, np, nm);
  int n = np + nm;
  for (std::uint32_t mask = 0; mask < (1u << beta); ++mask) {
    if (std::popcount(mask) > max_deg) continue;
    Mat<CRat> A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = CRat(Rational(num(rng), 4), Rational(num(rng), 3));
    g.add_term(MultiIndex(mask), A);
  }
  return g;
}

GradedFormC random_complex_form(std::mt19937_64& rng, int beta, int np, int nm, int max_deg) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GradedFormC g(beta, np, nm);
  int n = np + nm;
  for (std::uint32_t mask = 0; mask < (1u << beta); ++mask) {
    if (std::popcount(mask) > max_deg) continue;
    MatC A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = C(u(rng), u(rng));
    g.add_term(MultiIndex(mask), A);
  }
  return g;
}

}  // namespace

TEST_CASE("multi-index wedge signs") {
  auto i1 = MultiIndex::from_labels({1});
  auto i2 = MultiIndex::from_labels({2});
  CHECK(koszul_sign(i1.mask(), i2.mask()) == 1);
  CHECK(koszul_sign(i2.mask(), i1.mask()) == -1);
  CHECK(koszul_sign(i1.mask(), i1.mask()) == 0);
  auto i13 = MultiIndex::from_labels({1, 3});
  auto i24 = MultiIndex::from_labels({2, 4});
  // db1 db3 db2 db4 -> one crossing (3 past 2)
  CHECK(koszul_sign(i13.mask(), i24.mask()) == -1);
  CHECK(MultiIndex::from_labels({}).degree() == 0);
  CHECK_THROWS(MultiIndex::from_labels({2, 2}));
  CHECK_THROWS(MultiIndex::from_labels({3, 1}));
}

TEST_CASE("wedge_compose sign rule and identity") {
  // (db1 A) ^ (db2 B) = db1db2 (AB); reversed order flips sign and swaps factors
  GradedFormQ omega(2, 1, 0), sigma(2, 1, 0);
  omega.set_term(MultiIndex::from_labels({1}), rat_mat_1x1(2));
  sigma.set_term(MultiIndex::from_labels({2}), rat_mat_1x1(3));
  auto ws = wedge_compose(omega, sigma);
  auto sw = wedge_compose(sigma, omega);
  auto I12 = MultiIndex::from_labels({1, 2});
  CHECK(ws.term(I12)(0, 0) == CRat(6));
  CHECK(sw.term(I12)(0, 0) == CRat(-6));

  // identity-matrix degree-0 form is a two-sided unit
  std::mt19937_64 rng(7);
  auto x = random_rational_form(rng, 2, 2, 1, 2);
  auto e = GradedFormQ::identity(2, 2, 1);
  CHECK((wedge_compose(e, x) - x).is_zero());
  CHECK((wedge_compose(x, e) - x).is_zero());

  // db1 ^ db1 = 0
  auto z = wedge_compose(omega, omega);
  CHECK(z.is_zero());

  // mismatched dimensions rejected
  GradedFormQ other(2, 2, 0);
  CHECK_THROWS(wedge_compose(omega, other));
}

TEST_CASE("wedge_compose is associative (exact rational)") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 12; ++trial) {
    int beta = 1 + int(rng() % 3);
    int np = 1 + int(rng() % 2), nm = 1 + int(rng() % 2);
    auto a = random_rational_form(rng, beta, np, nm, beta);
    auto b = random_rational_form(rng, beta, np, nm, beta);
    auto c = random_rational_form(rng, beta, np, nm, beta);
    auto lhs = wedge_compose(wedge_compose(a, b), c);
    auto rhs = wedge_compose(a, wedge_compose(b, c));
    CHECK((lhs - rhs).is_zero());
  }
}

TEST_CASE("supertrace basics") {
  // identity on C^{2|1}, degree 0 -> 2 - 1 = 1
  auto e = GradedFormQ::identity(1, 2, 1);
  auto st = supertrace(e);
  REQUIRE(st.count(MultiIndex()) == 1);
  CHECK(st[MultiIndex()] == CRat(2 - 1));

  // db1 * (diag+(3) (+) diag-(3)) has vanishing supertrace
  Mat<CRat> diag33(2, 2);
  diag33(0, 0) = CRat(3);
  diag33(1, 1) = CRat(3);
  auto x = GradedFormQ::monomial(1, 1, 1, MultiIndex::from_labels({1}), diag33);
  CHECK(supertrace(x).empty());
}

TEST_CASE("supertrace kills graded commutators exactly") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    int beta = 1 + int(rng() % 3);
    int np = 1 + int(rng() % 3), nm = 1 + int(rng() % 2);
    auto x = random_rational_form(rng, beta, np, nm, beta);
    auto y = random_rational_form(rng, beta, np, nm, beta);
    auto st = supertrace(graded_commutator(x, y));
    CHECK(st.empty());
  }
}

TEST_CASE("delta_t rescaling") {
  Mat<CRat> a = rat_mat_1x1(1);
  auto w2 = GradedFormQ::monomial(2, 1, 0, MultiIndex::from_labels({1, 2}), a);

  // t=2 scales a degree-2 form by 1/4
  auto r = delta_t_rescale(w2, CRat(2));
  CHECK(r.term(MultiIndex::from_labels({1, 2}))(0, 0) == CRat(Rational(1, 4)));

  // t=1 is the identity map
  std::mt19937_64 rng(11);
  auto x = random_rational_form(rng, 3, 2, 1, 3);
  CHECK((delta_t_rescale(x, CRat(1)) - x).is_zero());

  // conjugation variant scales degree-2 operator terms by t^{-1}
  auto c = delta_t_conjugate(w2, CRat(2));
  CHECK(c.term(MultiIndex::from_labels({1, 2}))(0, 0) == CRat(Rational(1, 2)));

  CHECK_THROWS(delta_t_rescale(x, CRat(0)));

  // delta_s . delta_t = delta_{st} and delta_t is an algebra map
  auto y = random_rational_form(rng, 3, 2, 1, 3);
  CRat s(Rational(3, 2)), t(Rational(-5, 7));
  auto lhs = delta_t_rescale(delta_t_rescale(x, t), s);
  auto rhs = delta_t_rescale(x, s * t);
  CHECK((lhs - rhs).is_zero());
  auto am1 = delta_t_rescale(wedge_compose(x, y), t);
  auto am2 = wedge_compose(delta_t_rescale(x, t), delta_t_rescale(y, t));
  CHECK((am1 - am2).is_zero());
}

TEST_CASE("nilpotence of strictly positive degree forms") {
  std::mt19937_64 rng(19);
  for (int beta = 1; beta <= 3; ++beta) {
    auto x = random_rational_form(rng, beta, 2, 1, beta);
    // drop the degree-0 part
    GradedFormQ xp = x - x.degree_part(0);
    GradedFormQ p = GradedFormQ::identity(beta, 2, 1);
    for (int k = 0; k < beta + 1; ++k) p = wedge_compose(p, xp);
    CHECK(p.is_zero());
  }
}

TEST_CASE("numeric_dB") {
  MatC a(1, 1);
  a(0, 0) = C(1.5, -0.25);

  // constant family -> 0
  auto constant = GradedFamily::sample(
      [&](double) { return GradedFormC::monomial(1, 1, 0, MultiIndex(), a); }, 0.0, 0.1, 5);
  CHECK(numeric_dB(constant, 2).max_abs() == 0.0);

  // linear family b*A -> db A
  auto linear = GradedFamily::sample(
      [&](double b) { return GradedFormC::monomial(1, 1, 0, MultiIndex(), b * a); }, 0.0, 1e-3, 5);
  auto d = numeric_dB(linear, 2);
  CHECK(std::abs(d.term(MultiIndex::from_labels({1}))(0, 0) - a(0, 0)) < 1e-10);

  // quadratic family b^2 A at b=1 -> db 2A within 1e-8 at h=1e-4
  auto quad = GradedFamily::sample(
      [&](double b) { return GradedFormC::monomial(1, 1, 0, MultiIndex(), (b * b) * a); }, 1.0 - 1e-4, 1e-4, 3);
  auto dq = numeric_dB(quad, 1);
  CHECK(std::abs(dq.term(MultiIndex::from_labels({1}))(0, 0) - 2.0 * a(0, 0)) < 1e-8);

  // boundary without fallback is an error; with fallback it works
  CHECK_THROWS(numeric_dB(linear, 0));
  auto db0 = numeric_dB(linear, 0, 1, true);
  CHECK(std::abs(db0.term(MultiIndex::from_labels({1}))(0, 0) - a(0, 0)) < 1e-9);
}

TEST_CASE("degree part extraction and parity") {
  std::mt19937_64 rng(23);
  auto x = random_complex_form(rng, 3, 2, 1, 3);
  GradedFormC sum(3, 2, 1);
  for (int d = 0; d <= 3; ++d) sum = sum + x.degree_part(d);
  CHECK((sum - x).max_abs() == 0.0);

  // off-diagonal degree-1 term is odd
  MatC off(3, 3);
  off(0, 2) = C(1.0, 0.0);
  off(2, 1) = C(0.0, 2.0);
  auto odd = GradedFormC::monomial(1, 2, 1, MultiIndex(), off);
  CHECK(has_pure_parity(odd, 1));
  CHECK_FALSE(has_pure_parity(odd, 0));
}
