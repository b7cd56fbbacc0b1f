#ifndef VERTRACE_TRACE_LAB_HPP
#define VERTRACE_TRACE_LAB_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vertrace/fiber_spectra.hpp"
#include "vertrace/invariants.hpp"

namespace vertrace {

/// Gaussian-smoothed wave trace T(t) = sum_k m_k e^{it sqrt(lambda_k)} e^{-sigma^2 lambda_k}.
struct WaveTraceCurve {
  std::vector<double> t_grid;
  std::vector<std::complex<double>> values;
  double sigma = 0.0;
  double cutoff = 0.0;
  double tail_bound = 0.0;
};

/// Estimated spectral tail sum_{lambda > cutoff} m e^{-sigma^2 lambda} from
/// the local eigenvalue density near the cutoff (with a safety factor).
inline double spectral_tail_estimate(const SpectrumEntry& spec, double sigma) {
  if (spec.values.empty()) return 0.0;
  double lam_max = spec.cutoff;
  size_t n_hi = spec.count_below(lam_max);
  size_t n_mid = spec.count_below(lam_max / 2.0);
  double density = (double(n_hi) - double(n_mid)) / (lam_max / 2.0);
  double s2 = sigma * sigma;
  return 10.0 * std::max(density, 1.0 / lam_max) * std::exp(-s2 * lam_max) / s2;
}

inline WaveTraceCurve smoothed_wave_trace(const SpectrumEntry& spec, double sigma,
                                          std::vector<double> t_grid) {
  if (!(sigma > 0.0)) throw std::invalid_argument("smoothed_wave_trace: sigma > 0 required");
  double tail = spectral_tail_estimate(spec, sigma);
  if (tail > 1e-12)
    throw std::invalid_argument("smoothed_wave_trace: insufficient cutoff for requested sigma");
  WaveTraceCurve curve;
  curve.sigma = sigma;
  curve.cutoff = spec.cutoff;
  curve.tail_bound = tail;
  curve.t_grid = std::move(t_grid);
  curve.values.reserve(curve.t_grid.size());
  const double s2 = sigma * sigma;
  std::vector<double> roots(spec.values.size()), damps(spec.values.size());
  for (size_t k = 0; k < spec.values.size(); ++k) {
    roots[k] = std::sqrt(spec.values[k]);
    damps[k] = std::exp(-s2 * spec.values[k]) * spec.multiplicities[k];
  }
  for (double t : curve.t_grid) {
    std::complex<double> acc = 0.0;
    for (size_t k = 0; k < roots.size(); ++k)
      acc += damps[k] * std::exp(std::complex<double>(0.0, t * roots[k]));
    curve.values.push_back(acc);
  }
  return curve;
}

struct Peak {
  double location = 0.0;
  double height = 0.0;
  double width = 0.0;
};

struct PeakMatch {
  Peak peak;
  double length = 0.0;
  size_t length_index = 0;
};

struct PeakReport {
  std::vector<PeakMatch> matched;
  std::vector<Peak> unmatched;
  double threshold_used = 0.0;
};

/// Local maxima of |T| above threshold_factor * median, refined by 3-point
/// parabolic interpolation, matched greedily (descending height) to the
/// nearest unused geodesic length within tol; ties break toward smaller L.
inline PeakReport detect_singularities(const WaveTraceCurve& curve, const LengthEntry& lengths,
                                       double tol, double threshold_factor = 5.0) {
  const auto& t = curve.t_grid;
  std::vector<double> mag(curve.values.size());
  for (size_t i = 0; i < curve.values.size(); ++i) mag[i] = std::abs(curve.values[i]);
  std::vector<double> sorted_mag = mag;
  std::sort(sorted_mag.begin(), sorted_mag.end());
  double median = sorted_mag.empty() ? 0.0 : sorted_mag[sorted_mag.size() / 2];
  double threshold = threshold_factor * median;

  std::vector<Peak> peaks;
  for (size_t i = 1; i + 1 < mag.size(); ++i) {
    if (mag[i] <= threshold) continue;
    if (!(mag[i] >= mag[i - 1] && mag[i] > mag[i + 1])) continue;
    double denom = mag[i - 1] - 2.0 * mag[i] + mag[i + 1];
    double h = t[i + 1] - t[i];
    double shift = denom < 0.0 ? 0.5 * (mag[i - 1] - mag[i + 1]) / denom : 0.0;
    Peak p;
    p.location = t[i] + shift * h;
    p.height = mag[i] - 0.25 * (mag[i - 1] - mag[i + 1]) * shift;
    p.width = denom < 0.0 ? std::sqrt(std::max(0.0, -2.0 * mag[i] / denom)) * h : h;
    peaks.push_back(p);
  }

  PeakReport report;
  report.threshold_used = threshold;
  std::vector<Peak> by_height = peaks;
  std::sort(by_height.begin(), by_height.end(),
            [](const Peak& a, const Peak& b) { return a.height > b.height; });
  std::vector<bool> used(lengths.lengths.size(), false);
  for (const Peak& p : by_height) {
    std::optional<size_t> best;
    for (size_t k = 0; k < lengths.lengths.size(); ++k) {
      if (used[k]) continue;
      double d = std::abs(lengths.lengths[k] - p.location);
      if (d > tol) continue;
      if (!best || d < std::abs(lengths.lengths[*best] - p.location) - 1e-15) best = k;
      // equal distance: keep the smaller L, i.e. the earlier index
    }
    if (best) {
      used[*best] = true;
      report.matched.push_back({p, lengths.lengths[*best], *best});
    } else {
      report.unmatched.push_back(p);
    }
  }
  std::sort(report.matched.begin(), report.matched.end(),
            [](const PeakMatch& a, const PeakMatch& b) { return a.peak.location < b.peak.location; });
  return report;
}

struct HeatFitReport {
  std::vector<double> t_samples;
  std::vector<double> values;       // H(t) (4 pi t)^{q/2}
  double coefficient = 0.0;         // extrapolated t -> 0 limit
  double residual = 0.0;            // last extrapolation correction
  bool converged = false;
};

/// H(t) = sum m_k e^{-t lambda_k} on a geometric t-ladder; the leading
/// coefficient is lim H(t) (4 pi t)^{q/2} by Richardson (Neville)
/// extrapolation in t.
inline HeatFitReport heat_trace_fit(const SpectrumEntry& spec, int fiber_dim, double t_min,
                                    double t_max, int ladder = 8) {
  if (!(0.0 < t_min && t_min < t_max)) throw std::invalid_argument("heat_trace_fit: need 0 < t_min < t_max");
  if (spec.cutoff * t_min < 34.0)
    throw std::invalid_argument("heat_trace_fit: cutoff inadequate at t_min (truncation above 1e-14)");
  HeatFitReport rep;
  double ratio = std::pow(t_min / t_max, 1.0 / double(ladder - 1));
  for (int i = 0; i < ladder; ++i) {
    double t = t_max * std::pow(ratio, i);
    double H = 0.0;
    for (size_t k = 0; k < spec.values.size(); ++k)
      H += spec.multiplicities[k] * std::exp(-t * spec.values[k]);
    rep.t_samples.push_back(t);
    rep.values.push_back(H * std::pow(4.0 * M_PI * t, fiber_dim / 2.0));
  }
  // Neville extrapolation to t = 0 in the variable u = sqrt(t) (the heat
  // expansion of the scaled trace is a series in t^{1/2})
  std::vector<double> us(rep.t_samples.size());
  for (size_t i = 0; i < us.size(); ++i) us[i] = std::sqrt(rep.t_samples[i]);
  std::vector<double> col = rep.values;
  double prev = col.back();
  for (size_t k = 1; k < rep.values.size(); ++k) {
    std::vector<double> next(col.size() - 1);
    for (size_t i = 0; i + 1 < col.size(); ++i) {
      size_t j = i + k;
      next[i] = ((0.0 - us[j]) * col[i] + us[i] * col[i + 1]) / (us[i] - us[j]);
    }
    prev = col.back();
    col = std::move(next);
  }
  rep.coefficient = col.front();
  rep.residual = std::abs(rep.coefficient - prev);
  rep.converged = rep.residual < 1e-4 * std::max(1.0, std::abs(rep.coefficient));
  if (!rep.converged) throw std::runtime_error("heat_trace_fit: extrapolation non-convergence");
  return rep;
}

struct CrosscheckReport {
  double symbol_coefficient = 0.0;    // volume predicted from a_0 via b_0 = a_0/2
  double spectral_coefficient = 0.0;  // heat-fit extrapolation
  double rel_residual = 0.0;
};

/// t = 0 cross-pipeline check: the symbol-engine a_0 (via b_0 = a_0/2)
/// against the spectral heat-trace extrapolation, under the fixed
/// flat-model normalization (both sides equal the Riemannian volume).
inline CrosscheckReport t0_invariant_crosscheck(const LaplaceOperatorSpec& spec,
                                                double cutoff = 4.0e4) {
  auto a = wave_invariants_a(spec, 0);
  CrosscheckReport rep;
  rep.symbol_coefficient = volume_from_a0(a[0], spec.q);
  SpectrumEntry spectrum;
  double t_max = 0.05;
  if (spec.q == 1) {
    spectrum = circle_spectrum(spec.w, cutoff);
  } else {
    // flat square torus [0, 2pi)^2 with dual metric w: side 2pi/sqrt(w)
    double side = 2.0 * M_PI / std::sqrt(spec.w.eval(0.0).real());
    spectrum = torus_spectrum(TorusBasis{{side, 0.0}, {0.0, side}}, cutoff);
    t_max = 0.008;
  }
  auto fit = heat_trace_fit(spectrum, spec.q, 36.0 / cutoff, t_max);
  rep.spectral_coefficient = fit.coefficient;
  rep.rel_residual = std::abs(rep.symbol_coefficient - rep.spectral_coefficient) /
                     std::max(1e-30, std::abs(rep.spectral_coefficient));
  return rep;
}

}  // namespace vertrace

#endif
