#ifndef VERTRACE_EXPERIMENTS_HPP
#define VERTRACE_EXPERIMENTS_HPP

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "vertrace/config.hpp"
#include "vertrace/csv.hpp"
#include "vertrace/functional_calculus.hpp"
#include "vertrace/invariants.hpp"
#include "vertrace/ledger.hpp"
#include "vertrace/pushdown.hpp"
#include "vertrace/stationary_phase.hpp"
#include "vertrace/trace_lab.hpp"

namespace vertrace {

inline constexpr const char* kVersion = "vertrace 0.1.0";

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};

struct RunManifest {
  std::string kind;
  std::string version = kVersion;
  std::string config_text;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  std::vector<CheckResult> checks;
  std::vector<std::string> outputs;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["kind"] = kind;
    j["version"] = version;
    j["config"] = config_text;
    j["seed"] = seed;
    j["wall_time_s"] = wall_time_s;
    j["outputs"] = outputs;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
      j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance}});
    return j;
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.kind = j.at("kind").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.config_text = j.at("config").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.wall_time_s = j.at("wall_time_s").get<double>();
    for (const auto& o : j.at("outputs")) m.outputs.push_back(o.get<std::string>());
    for (const auto& c : j.at("checks"))
      m.checks.push_back({c.at("name").get<std::string>(), c.at("pass").get<bool>(),
                          c.at("value").get<double>(), c.at("tolerance").get<double>()});
    return m;
  }
};

namespace detail {

inline TrigQ trig_from_doubles(const std::vector<double>& cosc, const std::vector<double>& sinc) {
  std::vector<CRat> a, b;
  for (double v : cosc) a.push_back(CRat(Rational(v)));
  b.push_back(CRat(0));
  for (double v : sinc) b.push_back(CRat(Rational(v)));
  return TrigQ::from_cos_sin(a, b);
}

inline TrigC trigc_from_doubles(const std::vector<double>& cosc, const std::vector<double>& sinc) {
  std::vector<std::complex<double>> a, b;
  for (double v : cosc) a.push_back(v);
  b.push_back(0.0);
  for (double v : sinc) b.push_back(v);
  return TrigC::from_cos_sin(a, b);
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / double(n - 1);
  return v;
}

inline void check(std::vector<CheckResult>& cs, const std::string& name, double value, double tol) {
  cs.push_back({name, value <= tol, value, tol});
}

struct OutputDir {
  std::filesystem::path dir;
  std::vector<std::string>* outputs;
  std::string file(const std::string& name) const {
    std::filesystem::create_directories(dir);
    auto p = (dir / name).string();
    outputs->push_back(p);
    return p;
  }
};

// ---- wavetrace ------------------------------------------------------------

inline void run_wavetrace(const ExperimentConfig& cfg, const OutputDir& out,
                          std::vector<CheckResult>& checks) {
  cfg.require_known({"kind", "run.seed", "output.dir",
                     "model.type", "model.w_cos", "model.w_sin", "model.basis",
                     "model.L_range", "model.grid_count",
                     "wavetrace.sigma", "wavetrace.cutoff", "wavetrace.t_min", "wavetrace.t_max",
                     "wavetrace.t_count", "wavetrace.match_tol", "wavetrace.threshold",
                     "wavetrace.length_cutoff", "wavetrace.expected_peaks", "wavetrace.peak_tol"});
  std::string type = cfg.get_string("model.type");
  double sigma = cfg.get_double("wavetrace.sigma", 0.05);
  double cutoff = cfg.get_double("wavetrace.cutoff", 4.0e4);
  double t_min = cfg.get_double("wavetrace.t_min", 1.0);
  double t_max = cfg.get_double("wavetrace.t_max", 20.0);
  int t_count = int(cfg.get_int("wavetrace.t_count", 3900));
  double match_tol = cfg.get_double("wavetrace.match_tol", 3.0 * sigma);
  double threshold = cfg.get_double("wavetrace.threshold", 5.0);
  double length_cutoff = cfg.get_double("wavetrace.length_cutoff", t_max * 1.2);
  long expected_peaks = cfg.get_int("wavetrace.expected_peaks", 1);
  double peak_tol = cfg.get_double("wavetrace.peak_tol", 1e-2);

  std::vector<double> base_grid{0.0};
  std::function<SpectrumEntry(double)> spectrum_at;
  std::function<LengthEntry(double)> lengths_at;
  if (type == "circle") {
    TrigQ w = trig_from_doubles(cfg.get_doubles("model.w_cos"), cfg.get_doubles("model.w_sin", {}));
    spectrum_at = [=](double) { return circle_spectrum(w, cutoff); };
    lengths_at = [=](double) { return circle_lengths(w, length_cutoff); };
  } else if (type == "torus") {
    auto b = cfg.get_doubles("model.basis");
    if (b.size() != 4) throw ConfigValidationError("model.basis must hold 4 numbers");
    TorusBasis basis{{b[0], b[1]}, {b[2], b[3]}};
    spectrum_at = [=](double) { return torus_spectrum(basis, cutoff); };
    lengths_at = [=](double) { return torus_lengths(basis, length_cutoff); };
  } else if (type == "circle_family") {
    auto L = cfg.get_doubles("model.L_range");
    if (L.size() != 2) throw ConfigValidationError("model.L_range must hold 2 numbers");
    int n = int(cfg.get_int("model.grid_count", 9));
    base_grid = linspace(0.0, 1.0, n);
    auto w_of = [=](double b) {
      double len = L[0] + (L[1] - L[0]) * b;
      double c2 = std::pow(2.0 * M_PI / len, 2);
      return TrigQ(CRat(Rational(c2)));
    };
    spectrum_at = [=](double b) { return circle_spectrum(w_of(b), cutoff); };
    lengths_at = [=](double b) { return circle_lengths(w_of(b), length_cutoff); };
  } else {
    throw ConfigValidationError("model.type must be circle | torus | circle_family");
  }

  CsvWriter peaks_csv(out.file("peaks.csv"), {"b", "t_peak", "height", "matched_length"});
  CsvWriter spec_csv(out.file("spectrum.csv"), {"b", "value", "multiplicity"});
  CsvWriter len_csv(out.file("lengths.csv"), {"b", "value", "multiplicity"});
  double max_err = 0.0;
  size_t min_matched = SIZE_MAX;
  std::vector<double> primitive_track;
  for (size_t bi = 0; bi < base_grid.size(); ++bi) {
    double b = base_grid[bi];
    auto spec = spectrum_at(b);
    for (size_t k = 0; k < spec.values.size(); ++k)
      spec_csv.row({b, spec.values[k], double(spec.multiplicities[k])});
    auto lens = lengths_at(b);
    for (size_t k = 0; k < lens.lengths.size(); ++k)
      len_csv.row({b, lens.lengths[k], double(lens.multiplicities[k])});
    auto curve = smoothed_wave_trace(spec, sigma, linspace(t_min, t_max, t_count));
    CsvWriter curve_csv(out.file("curve_" + std::to_string(bi) + ".csv"), {"t", "re", "im", "abs"});
    for (size_t i = 0; i < curve.t_grid.size(); ++i)
      curve_csv.row({curve.t_grid[i], curve.values[i].real(), curve.values[i].imag(),
                     std::abs(curve.values[i])});
    auto report = detect_singularities(curve, lengths_at(b), match_tol, threshold);
    min_matched = std::min(min_matched, report.matched.size());
    const PeakMatch* primitive = nullptr;
    for (const auto& m : report.matched) {
      peaks_csv.row({b, m.peak.location, m.peak.height, m.length});
      max_err = std::max(max_err, std::abs(m.peak.location - m.length));
      if (!primitive || m.length < primitive->length) primitive = &m;
    }
    if (primitive) primitive_track.push_back(primitive->peak.location);
  }
  checks.push_back({"peaks_matched", min_matched >= size_t(expected_peaks), double(min_matched),
                    double(expected_peaks)});
  check(checks, "max_peak_error", max_err, peak_tol);
  if (base_grid.size() > 1) {
    double max_jump = 0.0;
    for (size_t i = 1; i < primitive_track.size(); ++i)
      max_jump = std::max(max_jump, std::abs(primitive_track[i] - primitive_track[i - 1]));
    // continuity bound 2 * dL of the primitive length per grid step
    double dL = std::abs(primitive_track.back() - primitive_track.front()) /
                double(primitive_track.size() - 1);
    check(checks, "track_continuity", max_jump, 2.0 * std::max(dL, 1e-6));
  }
}

// ---- heattrace ------------------------------------------------------------

inline void run_heattrace(const ExperimentConfig& cfg, const OutputDir& out,
                          std::vector<CheckResult>& checks) {
  cfg.require_known({"kind", "run.seed", "output.dir",
                     "model.type", "model.w_cos", "model.w_sin", "model.basis",
                     "heattrace.cutoff", "heattrace.t_min", "heattrace.t_max", "heattrace.ladder",
                     "heattrace.tol"});
  std::string type = cfg.get_string("model.type");
  double cutoff = cfg.get_double("heattrace.cutoff", 4.0e4);
  double t_min = cfg.get_double("heattrace.t_min", 36.0 / cutoff);
  int ladder = int(cfg.get_int("heattrace.ladder", 8));

  SpectrumEntry spec;
  double expected = 0.0;
  int q = 1;
  double t_max, tol;
  if (type == "circle") {
    TrigQ w = trig_from_doubles(cfg.get_doubles("model.w_cos"), cfg.get_doubles("model.w_sin", {}));
    spec = circle_spectrum(w, cutoff);
    expected = circle_length(w);
    q = 1;
    t_max = cfg.get_double("heattrace.t_max", 0.05);
    tol = cfg.get_double("heattrace.tol", 1e-3);
  } else if (type == "torus") {
    auto b = cfg.get_doubles("model.basis");
    if (b.size() != 4) throw ConfigValidationError("model.basis must hold 4 numbers");
    TorusBasis basis{{b[0], b[1]}, {b[2], b[3]}};
    spec = torus_spectrum(basis, cutoff);
    expected = basis.covolume();
    q = 2;
    t_max = cfg.get_double("heattrace.t_max", 0.01);
    tol = cfg.get_double("heattrace.tol", 5e-3);
  } else {
    throw ConfigValidationError("model.type must be circle | torus");
  }
  auto fit = heat_trace_fit(spec, q, t_min, t_max, ladder);
  CsvWriter csv(out.file("heatfit.csv"), {"t", "scaled_value"});
  for (size_t i = 0; i < fit.t_samples.size(); ++i) csv.row({fit.t_samples[i], fit.values[i]});
  check(checks, "volume_residual", std::abs(fit.coefficient - expected) / expected, tol);
  check(checks, "fit_residual", fit.residual, 1e-4 * std::max(1.0, std::abs(fit.coefficient)));
}

// ---- invariants -----------------------------------------------------------

inline void run_invariants(const ExperimentConfig& cfg, const OutputDir& out,
                           std::vector<CheckResult>& checks) {
  cfg.require_known({"kind", "run.seed", "output.dir", "model.w_cos", "model.w_sin",
                     "invariants.J"});
  TrigQ w = trig_from_doubles(cfg.get_doubles("model.w_cos"), cfg.get_doubles("model.w_sin", {}));
  int J = int(cfg.get_int("invariants.J", 6));
  LaplaceOperatorSpec spec{1, w};
  auto table = heat_invariants_b(spec, J);

  CsvWriter csv(out.file("invariants.csv"), {"j", "a_j", "b_j"});
  for (int j = 0; j <= J; ++j) csv.row({double(j), table.a[j], table.b[j]});
  CsvWriter zcsv(out.file("zeta.csv"), {"pole", "residue"});
  for (const auto& zr : table.zeta_residues) zcsv.row({zr.pole, zr.residue});

  double parity = 0.0, half = 0.0, higher = 0.0;
  for (int j = 1; j <= J; j += 2) parity = std::max(parity, std::abs(table.a[j]));
  for (int j = 0; j <= J; ++j) half = std::max(half, std::abs(table.b[j] - table.a[j] / 2.0));
  for (int j = 1; j <= J; ++j) higher = std::max(higher, std::abs(table.a[j]));
  check(checks, "parity_exact", parity, 0.0);
  check(checks, "b_minus_half_a", half, 1e-10);
  check(checks, "higher_a_vanish", higher, 1e-9);
  check(checks, "a0_vs_length", std::abs(table.a[0] - circle_length(w) / std::sqrt(M_PI)), 1e-9);
}

// ---- spa ------------------------------------------------------------------

inline void run_spa(const ExperimentConfig& cfg, const OutputDir& out,
                    std::vector<CheckResult>& checks) {
  cfg.require_known({"kind", "run.seed", "output.dir",
                     "spa.fiber", "spa.phi_cos", "spa.phi_sin", "spa.amp_cos", "spa.amp_sin",
                     "spa.r_check", "spa.slope_r", "spa.expected_codim"});
  FiberedPhase p;
  p.fiber = cfg.get_string("spa.fiber", "circle") == "torus" ? FiberKind::Torus : FiberKind::Circle;
  TrigC phi = trigc_from_doubles(cfg.get_doubles("spa.phi_cos"), cfg.get_doubles("spa.phi_sin", {}));
  TrigC amp = trigc_from_doubles(cfg.get_doubles("spa.amp_cos", {1.0}), cfg.get_doubles("spa.amp_sin", {}));
  p.phi_of_b = [phi](double) { return phi; };
  p.amplitude_of_b = [amp](double) { return amp; };
  double r_check = cfg.get_double("spa.r_check", 100.0);
  std::vector<double> slope_r = cfg.get_doubles("spa.slope_r", [] {
    std::vector<double> rs;
    for (int k : {12, 25, 51, 102}) rs.push_back(0.75 * M_PI + k * M_PI);
    return rs;
  }());
  int codim = int(cfg.get_int("spa.expected_codim", 1));

  CsvWriter csv(out.file("spa.csv"), {"r", "spa_re", "spa_im", "oracle_re", "oracle_im", "abs_err"});
  auto record = [&](double r) {
    auto s = spa_leading(p, 0.0, r);
    auto o = oscillatory_oracle(p, 0.0, r);
    csv.row({r, s.real(), s.imag(), o.real(), o.imag(), std::abs(s - o)});
    return std::abs(s - o) / std::max(1e-300, std::abs(o));
  };
  double rel = 0.0;
  for (double r : slope_r) record(r);
  rel = record(r_check);
  check(checks, "rel_error_at_r_check", rel, 0.02);
  auto fit = convergence_rate_check(p, 0.0, slope_r);
  double target = -(codim / 2.0 + 1.0);
  checks.push_back({"remainder_slope", !fit.floor_hit && std::abs(fit.slope - target) <= 0.25,
                    fit.floor_hit ? 0.0 : fit.slope, target});
}

// ---- pushdown ---------------------------------------------------------------

inline void run_pushdown(const ExperimentConfig& cfg, const OutputDir& out,
                         std::vector<CheckResult>& checks) {
  cfg.require_known({"kind", "run.seed", "output.dir",
                     "pushdown.scales", "pushdown.centers", "pushdown.covers"});
  auto scales = cfg.get_doubles("pushdown.scales", {0.5, 1.0, 2.0});
  auto centers = cfg.get_doubles("pushdown.centers", std::vector<double>(scales.size(), 0.0));
  if (centers.size() != scales.size())
    throw ConfigValidationError("pushdown.centers must match pushdown.scales in length");
  auto covers = cfg.get_doubles("pushdown.covers", {1, 2, 3});

  CsvWriter csv(out.file("pushdown.csv"),
                {"b", "scale", "center", "k", "value_re", "value_im", "tail_bound"});
  double classical = 0.0, dc = 0.0, tower = 0.0;
  const double tail_tol = 1e-13;
  for (size_t i = 0; i < scales.size(); ++i) {
    SchwartzFamily f{scales[i], centers[i]};
    classical = std::max(classical, classical_poisson_check(f));
    for (double kk : covers) {
      int k = int(kk);
      auto v = vertical_trace_cover(f, CoverSpec::circle_cover(k), 0.0, tail_tol);
      csv.row({double(i), scales[i], centers[i], double(k), v.real(), v.imag(), tail_tol});
      if (k == 2) {
        std::complex<double> expect = 0.0;
        for (int n = -40; n <= 40; ++n) expect += f.fourier(4.0 * M_PI * n);
        dc = std::max(dc, std::abs(v - 2.0 * expect));
      }
      if (k >= 2) {
        std::complex<double> composed = 0.0;
        double x = 0.37, y = 1.02;
        for (int j = 0; j < k; ++j)
          composed += pushdown_sum(f, CoverSpec::circle_cover(k), x, y + 2.0 * M_PI * j);
        tower = std::max(tower,
                         std::abs(composed - pushdown_sum(f, CoverSpec::circle_cover(1), x, y)));
      }
    }
  }
  check(checks, "classical_poisson", classical, 1e-12);
  check(checks, "double_cover_identity", dc, 1e-12);
  check(checks, "tower_consistency", tower, 1e-12);
}

// ---- matrixmodel ------------------------------------------------------------

inline Eigen::MatrixXcd random_hermitian_posdef(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = std::complex<double>(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd u = qr.householderQ();
  Eigen::VectorXd lam(n);
  std::uniform_real_distribution<double> ul(0.0, 0.35);
  for (int i = 0; i < n; ++i) lam(i) = 0.5 + 3.5 * (i + 0.5) / double(n) + ul(rng) / double(n);
  return u * lam.asDiagonal() * u.adjoint();
}

inline GradedFormC random_strict_positive_degree(std::mt19937_64& rng, int beta, int n, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GradedFormC q(beta, n, 0);
  for (std::uint32_t mask = 1; mask < (1u << beta); ++mask) {
    MatC A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = scale * std::complex<double>(u(rng), u(rng));
    q.add_term(MultiIndex(mask), A);
  }
  return q;
}

inline void run_matrixmodel(const ExperimentConfig& cfg, const OutputDir& out,
                            std::vector<CheckResult>& checks, std::mt19937_64& rng) {
  cfg.require_known({"kind", "run.seed", "output.dir",
                     "matrixmodel.count", "matrixmodel.max_dim", "matrixmodel.max_beta",
                     "matrixmodel.t", "matrixmodel.points_per_edge"});
  int count = int(cfg.get_int("matrixmodel.count", 50));
  int max_dim = int(cfg.get_int("matrixmodel.max_dim", 6));
  int max_beta = int(cfg.get_int("matrixmodel.max_beta", 3));
  double t = cfg.get_double("matrixmodel.t", 0.3);
  int ppe = int(cfg.get_int("matrixmodel.points_per_edge", 512));

  CsvWriter csv(out.file("matrixmodel.csv"),
                {"trial", "n", "beta", "resolvent", "root", "semigroup", "byparts", "wave_quad",
                 "heat_volterra", "contour"});
  double r_res = 0, r_root = 0, r_semi = 0, r_bp = 0, r_wave = 0, r_heat = 0, r_contour = 0;
  for (int trial = 0; trial < count; ++trial) {
    int n = 2 + int(rng() % std::max(1, max_dim - 1));
    int beta = 1 + int(rng() % max_beta);
    GradedOperator Q(random_hermitian_posdef(rng, n),
                     random_strict_positive_degree(rng, beta, n, 0.5));
    // resolvent identity
    std::complex<double> lam(-0.8, 0.5);
    double res = (wedge_compose(Q.as_form() - lam * Q.identity_form(), resolvent(Q, lam)) -
                  Q.identity_form())
                     .max_abs();
    // m-th root
    auto S = mth_root(Q, 3);
    double root = (wedge_compose(S, wedge_compose(S, S)) - Q.as_form()).max_abs();
    // semigroup
    double semi = (wedge_compose(complex_power(Q, 0.3), complex_power(Q, 0.9)) -
                   complex_power(Q, 1.2))
                      .max_abs();
    // by-parts
    double bp = (by_parts_power(Q, 0.7, 2) - complex_power(Q, 0.7)).max_abs();
    // wave: exact vs simplex quadrature
    auto wq = wave_duhamel_quadrature(Q, 2, t, 1e-10);
    double wave = (wave_duhamel(Q, 2, t) - wq.value).max_abs();
    // heat: exact vs Volterra
    auto hv = heat_volterra(Q, 0.7, 1e-11);
    double heat_res = (heat(Q, 0.7) - hv.value).max_abs();
    // contour wave
    double maxs = std::sqrt(Q.spectrum().eigenvalues.back());
    ContourSpec cs{0.5 * std::sqrt(Q.spectrum().eigenvalues.front()), 1.0, 10.0 * maxs, ppe};
    double contour = (wave_contour(Q, 0.1, cs) - wave_duhamel(Q, 2, 0.1)).max_abs();

    csv.row({double(trial), double(n), double(beta), res, root, semi, bp, wave, heat_res, contour});
    r_res = std::max(r_res, res);
    r_root = std::max(r_root, root);
    r_semi = std::max(r_semi, semi);
    r_bp = std::max(r_bp, bp);
    r_wave = std::max(r_wave, wave);
    r_heat = std::max(r_heat, heat_res);
    r_contour = std::max(r_contour, contour);
  }
  check(checks, "resolvent_identity", r_res, 1e-9);
  check(checks, "mth_root_identity", r_root, 1e-9);
  check(checks, "semigroup", r_semi, 1e-9);
  check(checks, "by_parts", r_bp, 1e-9);
  check(checks, "wave_quadrature", r_wave, 1e-8);
  check(checks, "heat_volterra", r_heat, 1e-9);
  check(checks, "wave_contour", r_contour, 1e-6);

  // supertrace index battery
  std::normal_distribution<double> g;
  double tvar = 0.0, ivsr = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    int np = 2 + int(rng() % 4), nm = 2 + int(rng() % 4);
    int r = int(rng() % std::min(np, nm));
    Eigen::MatrixXcd B(nm, std::max(1, r)), C(std::max(1, r), np);
    for (int i = 0; i < B.rows(); ++i)
      for (int j = 0; j < B.cols(); ++j) B(i, j) = std::complex<double>(g(rng), g(rng));
    for (int i = 0; i < C.rows(); ++i)
      for (int j = 0; j < C.cols(); ++j) C(i, j) = std::complex<double>(g(rng), g(rng));
    Eigen::MatrixXcd Dp = r == 0 ? Eigen::MatrixXcd::Zero(nm, np).eval() : (B * C).eval();
    auto v0 = supertrace_index(Dp, 0.0);
    double expected = double(np - nm);
    ivsr = std::max(ivsr, std::abs(v0 - expected));
    for (double tt : {0.1, 0.5, 1.0, 2.5, 5.0, 10.0})
      tvar = std::max(tvar, std::abs(supertrace_index(Dp, tt) - v0));
  }
  check(checks, "index_t_invariance", tvar, 1e-10);
  check(checks, "index_matches_rank", ivsr, 1e-10);
}

// ---- ledger -----------------------------------------------------------------

inline void run_ledger(const ExperimentConfig& cfg, const OutputDir& out,
                       std::vector<CheckResult>& checks) {
  cfg.require_known({"kind", "run.seed", "output.dir",
                     "ledger.q", "ledger.m", "ledger.nu", "ledger.d", "ledger.codims",
                     "ledger.v_max", "ledger.enforce_order_bound"});
  LedgerParams params;
  params.q = int(cfg.get_int("ledger.q", 1));
  params.m = int(cfg.get_int("ledger.m", 2));
  params.d = int(cfg.get_int("ledger.d", 0));
  params.v_max = int(cfg.get_int("ledger.v_max", 3));
  params.enforce_order_bound = cfg.get_int("ledger.enforce_order_bound", 0) != 0;
  if (cfg.has("ledger.nu")) {
    auto nu = cfg.get_doubles("ledger.nu");
    for (size_t i = 0; i < nu.size(); ++i) params.nu[int(i) + 1] = int(nu[i]);
  }
  for (double c : cfg.get_doubles("ledger.codims", {0.0})) params.codims.push_back(int(c));

  auto entries = singularity_ledger(params);
  CsvWriter csv(out.file("ledger.csv"), {"partition", "mu_d", "p_index", "codim", "v", "gamma", "log_flag"});
  int max_mu = std::numeric_limits<int>::min();
  bool d0_ok = true;
  for (const auto& e : entries) {
    csv.row_mixed({e.partition_str(), std::to_string(e.mu_d), std::to_string(e.p_index),
                   std::to_string(e.codim), std::to_string(e.v), CsvWriter::num(e.gamma()),
                   e.log_flag ? "1" : "0"});
    max_mu = std::max(max_mu, e.mu_d);
    if (params.d == 0)
      d0_ok = d0_ok && (e.gamma() == double(params.q - e.v)) && (e.log_flag == (e.v >= params.q));
  }
  if (params.d == 0)
    checks.push_back({"d0_structure", d0_ok, d0_ok ? 0.0 : 1.0, 0.0});
  else
    checks.push_back({"mu_nonpositive", max_mu <= 0, double(max_mu), 0.0});
}

}  // namespace detail

/// Execute the experiment named by the config; writes CSV artifacts and
/// returns the manifest. Exit-code policy is applied by the CLI wrapper.
inline RunManifest run_experiment(const ExperimentConfig& cfg,
                                  const std::string& out_override = "",
                                  std::optional<std::uint64_t> seed_override = {}) {
  auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.kind = cfg.get_string("kind");
  m.config_text = cfg.text();
  m.seed = seed_override ? *seed_override : std::uint64_t(cfg.get_int("run.seed", 12345));
  std::mt19937_64 rng(m.seed);

  std::string dir = out_override.empty() ? cfg.get_string("output.dir", "out") : out_override;
  detail::OutputDir out{dir, &m.outputs};

  if (m.kind == "wavetrace")
    detail::run_wavetrace(cfg, out, m.checks);
  else if (m.kind == "heattrace")
    detail::run_heattrace(cfg, out, m.checks);
  else if (m.kind == "invariants")
    detail::run_invariants(cfg, out, m.checks);
  else if (m.kind == "spa")
    detail::run_spa(cfg, out, m.checks);
  else if (m.kind == "pushdown")
    detail::run_pushdown(cfg, out, m.checks);
  else if (m.kind == "matrixmodel")
    detail::run_matrixmodel(cfg, out, m.checks, rng);
  else if (m.kind == "ledger")
    detail::run_ledger(cfg, out, m.checks);
  else
    throw ConfigValidationError("unknown experiment kind '" + m.kind + "'");

  m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::filesystem::create_directories(dir);
  std::ofstream mf(std::filesystem::path(dir) / "manifest.json");
  mf << m.to_json().dump(2) << "\n";
  m.outputs.push_back((std::filesystem::path(dir) / "manifest.json").string());
  return m;
}

struct CompareEntry {
  std::string name;
  double a = 0.0;
  double b = 0.0;
  double diff = 0.0;
  bool both_present = false;
};

struct CompareReport {
  bool kind_match = false;
  std::vector<CompareEntry> entries;
  double max_diff = 0.0;
  bool within(double tol) const {
    if (!kind_match) return false;
    for (const auto& e : entries)
      if (!e.both_present) return false;
    return max_diff <= tol;
  }
};

/// Field-wise residual comparison of two manifests of the same kind
/// (oracle-vs-method regression).
inline CompareReport compare_manifests(const RunManifest& a, const RunManifest& b) {
  CompareReport rep;
  rep.kind_match = (a.kind == b.kind);
  if (!rep.kind_match) return rep;
  for (const auto& ca : a.checks) {
    CompareEntry e;
    e.name = ca.name;
    e.a = ca.value;
    for (const auto& cb : b.checks)
      if (cb.name == ca.name) {
        e.b = cb.value;
        e.both_present = true;
      }
    e.diff = e.both_present ? std::abs(e.a - e.b) : 0.0;
    rep.entries.push_back(e);
    if (e.both_present) rep.max_diff = std::max(rep.max_diff, e.diff);
  }
  for (const auto& cb : b.checks) {
    bool found = false;
    for (const auto& ca : a.checks) found = found || ca.name == cb.name;
    if (!found) rep.entries.push_back({cb.name, 0.0, cb.value, 0.0, false});
  }
  return rep;
}

}  // namespace vertrace

#endif
