#ifndef VERTRACE_STATIONARY_PHASE_HPP
#define VERTRACE_STATIONARY_PHASE_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "vertrace/trig_poly.hpp"

namespace vertrace {

enum class FiberKind { Circle, Torus };

/// Fiberwise oscillatory data int e^{ir phi} q omega over a circle or a
/// 2-torus. Phases are trig polynomials in the fiber coordinate x; on the
/// torus the phase depends on x only (Bott-Morse critical circles) and the
/// amplitude factorizes as q(x, y) = amplitude(x) * amplitude_y(y).
struct FiberedPhase {
  FiberKind fiber = FiberKind::Circle;
  std::function<TrigC(double)> phi_of_b;
  std::function<TrigC(double)> amplitude_of_b;
  std::function<TrigC(double)> amplitude_y_of_b;  // torus only; defaults to 1

  TrigC phi(double b) const { return phi_of_b(b); }
  TrigC amplitude(double b) const {
    return amplitude_of_b ? amplitude_of_b(b) : TrigC(std::complex<double>(1.0, 0.0));
  }
  TrigC amplitude_y(double b) const {
    return amplitude_y_of_b ? amplitude_y_of_b(b) : TrigC(std::complex<double>(1.0, 0.0));
  }
};

/// A connected component of the fibrewise critical set: an isolated point on
/// the circle or a critical circle {x} x S^1 on the torus; the Hessian is
/// taken on the normal directions.
struct CriticalComponent {
  double x = 0.0;
  int codim = 1;
  double hessian = 0.0;
  int signature = 0;
  double phase_value = 0.0;
  bool is_circle = false;
};

/// Critical set of the fiber phase at base point b: sign-change bracketing
/// of phi' on a dense grid plus Newton polish to 1e-13; degenerate roots
/// (|phi''| below threshold) are rejected with a diagnostic.
inline std::vector<CriticalComponent> find_critical_set(const FiberedPhase& p, double b,
                                                        int grid = 4096) {
  TrigC phi = p.phi(b);
  TrigC dphi = phi.derivative();
  TrigC d2phi = dphi.derivative();
  double scale = 0.0;
  for (const auto& [k, c] : d2phi.coefficients()) scale += std::abs(c);
  scale = std::max(scale, 1e-30);

  std::vector<double> roots;
  double prev = dphi.eval(0.0).real();
  for (int i = 1; i <= grid; ++i) {
    double x = 2.0 * M_PI * i / grid;
    double cur = dphi.eval(x).real();
    if (prev == 0.0 || prev * cur < 0.0) {
      double lo = 2.0 * M_PI * (i - 1) / grid, hi = x;
      double z = prev == 0.0 ? lo : 0.5 * (lo + hi);
      for (int it = 0; it < 60; ++it) {
        double f = dphi.eval(z).real();
        double df = d2phi.eval(z).real();
        double step = (std::abs(df) > 1e-14) ? f / df : 0.0;
        double znew = z - step;
        if (znew < lo || znew > hi) {  // bisection fallback
          double fm = dphi.eval(0.5 * (lo + hi)).real();
          if (fm * dphi.eval(lo).real() <= 0.0)
            hi = 0.5 * (lo + hi);
          else
            lo = 0.5 * (lo + hi);
          znew = 0.5 * (lo + hi);
        }
        if (std::abs(znew - z) < 1e-15) {
          z = znew;
          break;
        }
        z = znew;
      }
      roots.push_back(std::fmod(z + 2.0 * M_PI, 2.0 * M_PI));
    }
    prev = cur;
  }
  // dedupe wrap-around duplicates
  std::sort(roots.begin(), roots.end());
  std::vector<double> uniq;
  for (double r : roots)
    if (uniq.empty() || (r - uniq.back() > 1e-8 && 2.0 * M_PI - r + uniq.front() > 1e-8))
      uniq.push_back(r);

  std::vector<CriticalComponent> out;
  for (double x : uniq) {
    double hess = d2phi.eval(x).real();
    if (std::abs(hess) < 1e-8 * scale)
      throw std::invalid_argument("find_critical_set: degenerate critical point at x = " +
                                  std::to_string(x) + " (|phi''| = " + std::to_string(std::abs(hess)) + ")");
    CriticalComponent c;
    c.x = x;
    c.codim = 1;
    c.hessian = hess;
    c.signature = hess > 0.0 ? 1 : -1;
    c.phase_value = phi.eval(x).real();
    c.is_circle = (p.fiber == FiberKind::Torus);
    out.push_back(c);
  }
  return out;
}

namespace detail {

inline std::complex<double> trapezoid_trig(const TrigC& f, int n) {
  std::complex<double> acc = 0.0;
  for (int i = 0; i < n; ++i) acc += f.eval(2.0 * M_PI * i / n);
  return acc * (2.0 * M_PI / n);
}

}  // namespace detail

/// Per-component leading stationary-phase terms
/// (2pi/r)^{n_i/2} e^{i pi sgn/4} e^{ir phi(W_i)} int_{W_i} q |det Hess|^{-1/2} omega.
inline std::vector<std::complex<double>> spa_leading_terms(const FiberedPhase& p, double b, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("spa_leading: r > 0 required");
  auto crit = find_critical_set(p, b);
  TrigC amp = p.amplitude(b);
  std::vector<std::complex<double>> terms;
  for (const auto& c : crit) {
    double wint = amp.eval(c.x).real() / std::sqrt(std::abs(c.hessian));
    std::complex<double> wfactor = wint;
    if (c.is_circle) {
      // integrate the y-amplitude along the critical circle
      wfactor *= detail::trapezoid_trig(p.amplitude_y(b), 256);
    }
    std::complex<double> term = std::pow(2.0 * M_PI / r, c.codim / 2.0) *
                                std::exp(std::complex<double>(0.0, M_PI * c.signature / 4.0)) *
                                std::exp(std::complex<double>(0.0, r * c.phase_value)) * wfactor;
    terms.push_back(term);
  }
  return terms;
}

inline std::complex<double> spa_leading(const FiberedPhase& p, double b, double r) {
  std::complex<double> acc = 0.0;
  for (auto t : spa_leading_terms(p, b, r)) acc += t;
  return acc;
}

/// Brute-force periodic-trapezoid evaluation of int e^{ir phi} q omega with
/// grid at least 40 sqrt(r) points per 2pi per dimension, doubled until
/// self-convergent to 1e-10.
inline std::complex<double> oscillatory_oracle(const FiberedPhase& p, double b, double r) {
  TrigC phi = p.phi(b);
  TrigC amp = p.amplitude(b);
  auto eval = [&](int n) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double x = 2.0 * M_PI * i / n;
      acc += std::exp(std::complex<double>(0.0, r * phi.eval(x).real())) * amp.eval(x);
    }
    return acc * (2.0 * M_PI / n);
  };
  int n = std::max(64, int(std::ceil(40.0 * std::sqrt(std::max(1.0, r)))));
  std::complex<double> prev = eval(n);
  std::complex<double> cur = prev;
  bool converged = false;
  for (int it = 0; it < 5; ++it) {
    n *= 2;
    cur = eval(n);
    if (std::abs(cur - prev) < 1e-10 * (1.0 + std::abs(cur))) {
      converged = true;
      break;
    }
    prev = cur;
  }
  if (!converged) throw std::runtime_error("oscillatory_oracle: grid doubling did not converge");
  if (p.fiber == FiberKind::Torus) cur *= detail::trapezoid_trig(p.amplitude_y(b), 1024);
  return cur;
}

struct RateFit {
  double slope = 0.0;
  bool floor_hit = false;
  std::vector<double> errors;
};

/// Log-log fit of |oracle - spa_leading| against r; for a clean Morse or
/// Bott-Morse component the remainder scales like r^{-(n_i/2 + 1)}.
inline RateFit convergence_rate_check(const FiberedPhase& p, double b,
                                      const std::vector<double>& r_list) {
  if (r_list.size() < 3) throw std::invalid_argument("convergence_rate_check: need >= 3 values of r");
  RateFit fit;
  double floor_scale = 0.0;
  for (double r : r_list) {
    std::complex<double> oracle = oscillatory_oracle(p, b, r);
    std::complex<double> spa = spa_leading(p, b, r);
    fit.errors.push_back(std::abs(oracle - spa));
    floor_scale = std::max(floor_scale, std::abs(oracle));
  }
  double floor = 1e-8 * std::max(1.0, floor_scale);
  bool all_floor = true;
  for (double e : fit.errors) all_floor = all_floor && (e < floor);
  if (all_floor) {
    fit.floor_hit = true;
    return fit;
  }
  // least squares on log-log
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = int(r_list.size());
  for (int i = 0; i < n; ++i) {
    double X = std::log(r_list[i]);
    double Y = std::log(std::max(fit.errors[i], 1e-300));
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

}  // namespace vertrace

#endif
