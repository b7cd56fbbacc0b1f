#ifndef VERTRACE_PARAMETRIX_HPP
#define VERTRACE_PARAMETRIX_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vertrace/symbol_ring.hpp"

namespace vertrace {

/// Scalar Laplace-type operator on a circle fiber (q = 1, curved) or a flat
/// model (q = 1 or 2, constant dual metric). w is the dual metric g^{xx};
/// the operator is Delta = -w d^2/dx^2 - (w'/2) d/dx acting in
/// L^2(w^{-1/2} dx), with g = 1/w.
struct LaplaceOperatorSpec {
  int q = 1;
  TrigQ w;
  double family_param = 0.0;

  void validate() const {
    if (q != 1 && q != 2) throw std::invalid_argument("LaplaceOperatorSpec: q must be 1 or 2");
    if (q == 2 && w.max_frequency() != 0)
      throw std::invalid_argument("LaplaceOperatorSpec: q = 2 requires a constant (flat) metric");
    if (!w.is_real_valued()) throw std::invalid_argument("LaplaceOperatorSpec: w must be real-valued");
    if (!w.is_positive()) throw std::invalid_argument("LaplaceOperatorSpec: w must be positive");
  }
};

/// Homogeneous symbol components of Delta: p2 = w xi^2, p1 = -i (w'/2) xi,
/// p0 = 0. Returned as levels of (p - lambda), i.e. the quasi-degree-2 part
/// is D = w xi^2 - lambda.
inline SymbolLevels laplace_symbol_levels(const LaplaceOperatorSpec& spec) {
  spec.validate();
  SymbolLevels p;
  {
    XiPoly top;
    xp_add(top, 0, TrigQ(CRat(1)));
    LaurentSymbol d;
    ls_add(d, 1, top);  // D^{+1}
    p[2] = d;
  }
  {
    TrigQ p1 = (-CRat::i() / CRat(2)) * spec.w.derivative();
    if (!p1.is_zero()) {
      XiPoly xp;
      xp_add(xp, 1, p1);
      LaurentSymbol d;
      ls_add(d, 0, xp);
      p[1] = d;
    }
  }
  return p;
}

/// The plain symbol components (p2, p1, p0) as xi-polynomials, for tests.
inline std::array<XiPoly, 3> laplace_symbol(const LaplaceOperatorSpec& spec) {
  spec.validate();
  std::array<XiPoly, 3> c;
  xp_add(c[0], 2, spec.w);                                          // p2
  TrigQ p1 = (-CRat::i() / CRat(2)) * spec.w.derivative();
  if (!p1.is_zero()) xp_add(c[1], 1, p1);                           // p1
  return c;                                                          // p0 = 0
}

/// Resolvent parametrix levels r_{-2-j}[lambda], j = 0..J, from the
/// recursion r_{-2-j} = -r_{-2} sum_{(2-k)+|alpha|+l=j, l<j}
/// ((-i)^alpha/alpha!) d_xi^alpha p_k d_x^alpha r_{-2-l}, exact.
inline std::vector<LaurentSymbol> parametrix_recursion(const LaplaceOperatorSpec& spec, int J) {
  if (J > 8) throw std::invalid_argument("parametrix_recursion: J <= 8 (exact arithmetic budget)");
  spec.validate();
  const TrigQ& w = spec.w;
  SymbolLevels p = laplace_symbol_levels(spec);

  std::vector<LaurentSymbol> r(J + 1);
  {
    XiPoly one;
    xp_add(one, 0, TrigQ(CRat(1)));
    ls_add(r[0], -1, one);
  }
  for (int j = 1; j <= J; ++j) {
    LaurentSymbol acc;
    for (const auto& [qp, pk] : p) {
      int drop = 2 - qp;  // quasi-degree deficit of p_k
      LaurentSymbol dpk = pk;
      CRat coef(1);
      for (int alpha = 0; alpha + drop <= j; ++alpha) {
        if (alpha > 0) {
          dpk = ls_dxi(dpk, w);
          coef = coef * (-CRat::i()) / CRat(alpha);
          if (dpk.empty()) break;
        }
        int l = j - drop - alpha;
        if (l < 0 || l >= j) continue;
        LaurentSymbol rb = r[l];
        for (int t = 0; t < alpha; ++t) rb = ls_dx(rb, w);
        acc = ls_add(acc, ls_scale(ls_mul(dpk, rb), coef));
      }
    }
    // multiply by -D^{-1}
    for (const auto& [pw, xp] : acc) {
      XiPoly neg;
      for (const auto& [d, t] : xp) xp_add(neg, d, CRat(-1) * t);
      ls_add(r[j], pw - 1, neg);
    }
  }
  return r;
}

/// The eq.-scalar-res-symbol normal form of one level: l -> r_{l,j} with
/// r_{-2-j} = sum_l D^{-(l+1)} r_{l,j}. Throws if a positive power appears.
inline std::map<int, XiPoly> level_normal_form(const LaurentSymbol& level) {
  std::map<int, XiPoly> out;
  for (const auto& [p, xp] : level) {
    if (p >= 0) throw std::logic_error("level_normal_form: nonnegative D-power in resolvent level");
    out[-p - 1] = xp;
  }
  return out;
}

struct HomogeneityReport {
  bool ok = true;
  std::string detail;
};

/// Audit: each stored r_{l,j} is a xi-polynomial of degree exactly 2l - j,
/// with l in [ceil(j/2), 2j].
inline HomogeneityReport homogeneity_audit(const std::vector<LaurentSymbol>& r) {
  HomogeneityReport rep;
  for (size_t j = 0; j < r.size(); ++j) {
    for (const auto& [l, xp] : level_normal_form(r[j])) {
      if (l < (int(j) + 1) / 2 || l > 2 * int(j)) {
        rep.ok = false;
        rep.detail += "level " + std::to_string(j) + ": l=" + std::to_string(l) + " out of range; ";
      }
      for (const auto& [d, t] : xp)
        if (d != 2 * l - int(j)) {
          rep.ok = false;
          rep.detail += "level " + std::to_string(j) + ": xi-degree " + std::to_string(d) +
                        " != " + std::to_string(2 * l - int(j)) + "; ";
        }
    }
  }
  return rep;
}

/// Telescoping check: (p - lambda) o (sum_j r_{-2-j}) equals 1 in levels
/// 0, -1, ..., -J, coefficient-exact. Uses the independent symbol_compose.
inline bool telescoping_check(const LaplaceOperatorSpec& spec, const std::vector<LaurentSymbol>& r) {
  SymbolLevels p = laplace_symbol_levels(spec);
  SymbolLevels rs;
  for (size_t j = 0; j < r.size(); ++j) rs[-2 - int(j)] = r[j];
  int J = int(r.size()) - 1;
  SymbolLevels comp = symbol_compose(p, rs, spec.w, -J);
  for (const auto& [q, e] : comp) {
    if (q > 0 || q < -J) continue;
    LaurentSymbol expect;
    if (q == 0) {
      XiPoly one;
      xp_add(one, 0, TrigQ(CRat(1)));
      ls_add(expect, 0, one);
    }
    if (!ls_equals(e, expect, spec.w)) return false;
  }
  return comp.count(0) == 1;  // the identity level must be present
}

}  // namespace vertrace

#endif
