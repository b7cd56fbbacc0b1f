#ifndef VERTRACE_SYMBOL_RING_HPP
#define VERTRACE_SYMBOL_RING_HPP

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vertrace/trig_poly.hpp"

namespace vertrace {

// Exact coefficient ring for the q = 1 resolvent parametrix: finite sums
//    sum_p D^p * (xi-polynomial with TrigQ coefficients),   D = w(x) xi^2 - lambda.
// Closed under +, *, d/dxi, d/dx. Quasi-homogeneity (xi of weight 1, lambda
// of weight 2) is carried per level, not per term.

/// Polynomial in xi with trig-polynomial coefficients.
using XiPoly = std::map<int, TrigQ>;

inline void xp_add(XiPoly& dst, int deg, const TrigQ& t) {
  if (t.is_zero()) return;
  auto it = dst.find(deg);
  if (it == dst.end()) {
    dst.emplace(deg, t);
  } else {
    it->second = it->second + t;
    if (it->second.is_zero()) dst.erase(it);
  }
}

inline XiPoly xp_mul(const XiPoly& a, const XiPoly& b) {
  XiPoly r;
  for (const auto& [d1, t1] : a)
    for (const auto& [d2, t2] : b) xp_add(r, d1 + d2, t1 * t2);
  return r;
}

/// Laurent element: D-power -> xi-polynomial numerator.
using LaurentSymbol = std::map<int, XiPoly>;

inline void ls_add(LaurentSymbol& dst, int pow, const XiPoly& xp) {
  if (xp.empty()) return;
  auto& slot = dst[pow];
  for (const auto& [d, t] : xp) xp_add(slot, d, t);
  if (slot.empty()) dst.erase(pow);
}

inline LaurentSymbol ls_add(const LaurentSymbol& a, const LaurentSymbol& b) {
  LaurentSymbol r = a;
  for (const auto& [p, xp] : b) ls_add(r, p, xp);
  return r;
}

inline LaurentSymbol ls_scale(const LaurentSymbol& a, const CRat& s) {
  LaurentSymbol r;
  for (const auto& [p, xp] : a) {
    XiPoly sx;
    for (const auto& [d, t] : xp) xp_add(sx, d, s * t);
    ls_add(r, p, sx);
  }
  return r;
}

inline LaurentSymbol ls_mul(const LaurentSymbol& a, const LaurentSymbol& b) {
  LaurentSymbol r;
  for (const auto& [p1, x1] : a)
    for (const auto& [p2, x2] : b) ls_add(r, p1 + p2, xp_mul(x1, x2));
  return r;
}

/// d/dxi: xi^d -> d xi^{d-1}; D^p -> p D^{p-1} 2 w xi.
inline LaurentSymbol ls_dxi(const LaurentSymbol& a, const TrigQ& w) {
  LaurentSymbol r;
  for (const auto& [p, xp] : a) {
    XiPoly down;
    for (const auto& [d, t] : xp)
      if (d != 0) xp_add(down, d - 1, CRat(d) * t);
    ls_add(r, p, down);
    if (p != 0) {
      XiPoly shift;
      for (const auto& [d, t] : xp) xp_add(shift, d + 1, CRat(2L * p) * (w * t));
      ls_add(r, p - 1, shift);
    }
  }
  return r;
}

/// d/dx: acts on trig coefficients; D^p -> p D^{p-1} w' xi^2.
inline LaurentSymbol ls_dx(const LaurentSymbol& a, const TrigQ& w) {
  TrigQ wp = w.derivative();
  LaurentSymbol r;
  for (const auto& [p, xp] : a) {
    XiPoly dcoef;
    for (const auto& [d, t] : xp) xp_add(dcoef, d, t.derivative());
    ls_add(r, p, dcoef);
    if (p != 0) {
      XiPoly shift;
      for (const auto& [d, t] : xp) xp_add(shift, d + 2, CRat(p) * (wp * t));
      ls_add(r, p - 1, shift);
    }
  }
  return r;
}

/// A polyhomogeneous symbol, stored level by level: quasi-degree -> element.
using SymbolLevels = std::map<int, LaurentSymbol>;

/// Composition (a o b)_j = sum_{|alpha|+k+l=j} ((-i)^alpha / alpha!)
/// d_xi^alpha a_k d_x^alpha b_l, level by level, exact. Levels below
/// min_qdeg are dropped.
inline SymbolLevels symbol_compose(const SymbolLevels& a, const SymbolLevels& b, const TrigQ& w,
                                   int min_qdeg) {
  SymbolLevels out;
  for (const auto& [qa, ea] : a) {
    LaurentSymbol da = ea;
    CRat coef(1);
    for (int alpha = 0;; ++alpha) {
      if (alpha > 0) {
        da = ls_dxi(da, w);
        coef = coef * (-CRat::i()) / CRat(alpha);
        if (da.empty()) break;
      }
      bool used = false;
      for (const auto& [qb, eb] : b) {
        int q = qa + qb - alpha;
        if (q < min_qdeg) continue;
        used = true;
        LaurentSymbol db = eb;
        for (int t = 0; t < alpha; ++t) db = ls_dx(db, w);
        if (db.empty()) continue;
        out[q] = ls_add(out[q], ls_scale(ls_mul(da, db), coef));
      }
      if (!used && alpha > 0) break;
    }
  }
  for (auto it = out.begin(); it != out.end();)
    it = it->second.empty() ? out.erase(it) : std::next(it);
  return out;
}

/// Canonical (xi, lambda)-polynomial form over a common denominator power:
/// key (xi degree, lambda degree) -> trig coefficient. Used for exact
/// equality checks of Laurent elements.
using XiLamPoly = std::map<std::pair<int, int>, TrigQ>;

inline XiLamPoly ls_canonical(const LaurentSymbol& a, const TrigQ& w, int& denom_pow) {
  int minp = 0;
  for (const auto& [p, xp] : a) minp = std::min(minp, p);
  denom_pow = -minp;
  XiLamPoly out;
  for (const auto& [p, xp] : a) {
    int e = p + denom_pow;  // expand D^e into the numerator
    // (w xi^2 - lambda)^e = sum_i C(e,i) (w xi^2)^{e-i} (-lambda)^i
    std::vector<CRat> binom(e + 1);
    binom[0] = CRat(1);
    for (int i = 1; i <= e; ++i) binom[i] = binom[i - 1] * CRat(e - i + 1) / CRat(i);
    for (int i = 0; i <= e; ++i) {
      TrigQ wpow(CRat(1));
      for (int t = 0; t < e - i; ++t) wpow = wpow * w;
      CRat sign = (i % 2) ? CRat(-1) : CRat(1);
      for (const auto& [d, tc] : xp) {
        TrigQ term = (binom[i] * sign) * (wpow * tc);
        if (term.is_zero()) continue;
        auto key = std::make_pair(d + 2 * (e - i), i);
        auto it = out.find(key);
        if (it == out.end()) {
          out.emplace(key, term);
        } else {
          it->second = it->second + term;
          if (it->second.is_zero()) out.erase(it);
        }
      }
    }
  }
  return out;
}

inline bool ls_equals(const LaurentSymbol& a, const LaurentSymbol& b, const TrigQ& w) {
  LaurentSymbol diff = ls_add(a, ls_scale(b, CRat(-1)));
  int dp = 0;
  return ls_canonical(diff, w, dp).empty();
}

}  // namespace vertrace

#endif
