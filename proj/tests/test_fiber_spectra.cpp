#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "vertrace/fiber_spectra.hpp"

using namespace vertrace;

namespace {

TrigQ w_const(long num, long den = 1) { return TrigQ(CRat(Rational(num, den))); }

TrigQ w_curved() {
  TrigQ w(CRat(1));
  w.add(1, CRat(Rational(3, 20)));
  w.add(-1, CRat(Rational(3, 20)));
  return w;
}

/// Adaptive Simpson quadrature oracle for the circle length.
double simpson_length_oracle(const TrigQ& w) {
  std::function<double(double)> f = [&](double x) { return std::pow(w.eval(x).real(), -0.5); };
  std::function<double(double, double, double, double, double, double)> rec =
      [&](double a, double b, double fa, double fb, double fm, double whole) -> double {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (std::abs(left + right - whole) < 1e-14 * std::abs(whole)) return left + right;
    return rec(a, m, fa, fm, flm, left) + rec(m, b, fm, fb, frm, right);
  };
  double a = 0.0, b = 2.0 * M_PI;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fb, fm, whole);
}

}  // namespace

TEST_CASE("circle_length") {
  CHECK(std::abs(circle_length(w_const(1)) - 2.0 * M_PI) < 1e-13);
  CHECK(std::abs(circle_length(w_const(4)) - M_PI) < 1e-13);

  // curved metric vs adaptive quadrature oracle
  auto w = w_curved();
  CHECK(std::abs(circle_length(w) - simpson_length_oracle(w)) < 1e-12);

  // nonpositive sample detected
  CHECK_THROWS(circle_length(TrigQ::from_cos_sin({CRat(1), CRat(2)}, {})));
}

TEST_CASE("circle_spectrum") {
  // flat: lambda = n^2, multiplicity 2 for n >= 1
  auto flat = circle_spectrum(w_const(1), 20.0);
  REQUIRE(flat.values.size() == 5);  // 0, 1, 4, 9, 16
  CHECK(flat.values[0] == 0.0);
  CHECK(flat.multiplicities[0] == 1);
  for (int n = 1; n <= 4; ++n) {
    CHECK(std::abs(flat.values[n] - n * n) < 1e-12);
    CHECK(flat.multiplicities[n] == 2);
  }

  // w = 4 (L = pi): lambda = 4 n^2
  auto c = circle_spectrum(w_const(4), 40.0);
  CHECK(std::abs(c.values[1] - 4.0) < 1e-12);
  CHECK(std::abs(c.values[2] - 16.0) < 1e-12);
  CHECK(std::abs(c.values[3] - 36.0) < 1e-12);
}

TEST_CASE("circle_spectrum_numeric: flat sanity") {
  auto ev = circle_spectrum_numeric(w_const(1), 256, 5);
  double expect[5] = {0.0, 1.0, 1.0, 4.0, 4.0};
  for (int i = 0; i < 5; ++i) CHECK(std::abs(ev[i] - expect[i]) < 2e-3);

  auto ev4 = circle_spectrum_numeric(w_const(4), 256, 5);
  double expect4[5] = {0.0, 4.0, 4.0, 16.0, 16.0};
  for (int i = 0; i < 5; ++i) CHECK(std::abs(ev4[i] - expect4[i]) < 1e-2);

  CHECK_THROWS(circle_spectrum_numeric(w_const(1), 16, 5));  // grid too small
}

TEST_CASE("circle_spectrum vs numeric oracle, curved") {
  auto w = w_curved();
  auto exact = circle_spectrum(w, 700.0);
  // Fourier discretization: spectral accuracy on the first 20 modes
  auto num = circle_spectrum_numeric(w, 160, 20, CircleDiscretization::Fourier);
  std::vector<double> flat_exact;
  for (size_t i = 0; i < exact.values.size(); ++i)
    for (int m = 0; m < exact.multiplicities[i]; ++m) flat_exact.push_back(exact.values[i]);
  for (int i = 0; i < 20; ++i) CHECK(std::abs(num[i] - flat_exact[i]) < 1e-6);

  // finite differences: grid-doubling Richardson agreement
  auto c1 = circle_spectrum_numeric(w, 400, 10);
  auto c2 = circle_spectrum_numeric(w, 800, 10);
  for (int i = 0; i < 10; ++i) {
    double richardson = c2[i] + (c2[i] - c1[i]) / 3.0;  // O(h^2) stencil
    CHECK(std::abs(richardson - flat_exact[i]) < 1e-5);
  }
}

TEST_CASE("torus spectrum and lengths, unit lattice") {
  TorusBasis unit;
  auto lengths = torus_lengths(unit, 2.5);
  REQUIRE(lengths.lengths.size() == 4);  // 1, sqrt2, 2, sqrt5
  CHECK(std::abs(lengths.lengths[0] - 1.0) < 1e-12);
  CHECK(lengths.multiplicities[0] == 4);
  CHECK(std::abs(lengths.lengths[1] - std::sqrt(2.0)) < 1e-12);
  CHECK(lengths.multiplicities[1] == 4);
  CHECK(std::abs(lengths.lengths[2] - 2.0) < 1e-12);
  CHECK(lengths.multiplicities[2] == 4);
  CHECK(std::abs(lengths.lengths[3] - std::sqrt(5.0)) < 1e-12);
  CHECK(lengths.multiplicities[3] == 8);

  auto spec = torus_spectrum(unit, 9.0 * M_PI * M_PI);
  CHECK(spec.values[0] == 0.0);
  CHECK(spec.multiplicities[0] == 1);
  CHECK(std::abs(spec.values[1] - 4.0 * M_PI * M_PI) < 1e-9);
  CHECK(spec.multiplicities[1] == 4);
  CHECK(std::abs(spec.values[2] - 8.0 * M_PI * M_PI) < 1e-9);
  CHECK(spec.multiplicities[2] == 4);
}

TEST_CASE("torus rectangle and sheared lattices") {
  TorusBasis rect{{1.0, 0.0}, {0.0, 0.4}};
  CHECK(std::abs(rect.covolume() - 0.4) < 1e-15);
  auto lens = torus_lengths(rect, 1.5);
  CHECK(std::abs(lens.lengths[0] - 0.4) < 1e-12);  // shortest = min(1, h)

  // sheared basis vs brute-force double loop
  TorusBasis sheared{{1.0, 0.0}, {0.3, 1.1}};
  auto fast = torus_lengths(sheared, 4.0);
  std::vector<double> brute;
  for (int m1 = -12; m1 <= 12; ++m1)
    for (int m2 = -12; m2 <= 12; ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      double x = m1 * 1.0 + m2 * 0.3, y = m2 * 1.1;
      double l = std::hypot(x, y);
      if (l <= 4.0) brute.push_back(l);
    }
  std::sort(brute.begin(), brute.end());
  size_t total = 0;
  for (size_t i = 0; i < fast.lengths.size(); ++i) total += fast.multiplicities[i];
  REQUIRE(total == brute.size());
  size_t bi = 0;
  for (size_t i = 0; i < fast.lengths.size(); ++i)
    for (int m = 0; m < fast.multiplicities[i]; ++m, ++bi)
      CHECK(std::abs(fast.lengths[i] - brute[bi]) < 1e-9);

  TorusBasis degenerate{{1.0, 0.0}, {2.0, 0.0}};
  CHECK_THROWS(torus_lengths(degenerate, 2.0));
}

TEST_CASE("Weyl counts") {
  // q = 1: #{lambda <= L} ~ (L/pi) sqrt(Lambda)
  auto flat = circle_spectrum(w_const(1), 1.0e4);
  double count1 = double(flat.count_below(1.0e4));
  CHECK(std::abs(count1 - 2.0 * 100.0) / count1 < 0.05);

  // q = 2: ~ (vol / 4pi) Lambda
  TorusBasis unit;
  auto spec = torus_spectrum(unit, 2000.0);
  double count2 = double(spec.count_below(2000.0));
  CHECK(std::abs(count2 - 2000.0 / (4.0 * M_PI)) / count2 < 0.05);
}

TEST_CASE("families and track continuity") {
  MetricCircleFamily fam;
  fam.base_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  fam.w_of_b = [](double b) {
    // constant-curvature circles with L(b) = 4 + 2b
    double L = 4.0 + 2.0 * b;
    double c = 2.0 * M_PI / L;
    // rational approximation of c^2 keeps the exact pipeline available
    return TrigQ(CRat(Rational(long(c * c * 1e12), long(1e12))));
  };
  auto lt = fam.length_table(20.0);
  REQUIRE(lt.entries.size() == 5);
  for (size_t i = 0; i < 5; ++i)
    CHECK(std::abs(lt.entries[i].lengths[0] - (4.0 + 2.0 * fam.base_grid[i])) < 1e-6);
  // continuity: the primitive track moves by dL = 0.5 per step, within 2*dL
  auto jumps = length_track_jumps(lt, 2.0 * 0.5, 1);
  CHECK(jumps.empty());
  // a crossing-scale bound on higher tracks is violated by design (track k
  // moves (k+1) dL) and gets flagged rather than resolved
  auto flagged = length_track_jumps(lt, 0.6);
  CHECK_FALSE(flagged.empty());

  FlatTorusFamily tf;
  tf.base_grid = {0.0, 0.5, 1.0};
  tf.basis_of_b = [](double b) { return TorusBasis{{1.0, 0.0}, {0.2 * b, 1.0}}; };
  auto tl = tf.length_table(3.0);
  CHECK(tl.entries.size() == 3);
}
