// Command-line driver: one subcommand per experiment kind plus `compare`.
// Exit codes: 0 all checks pass, 1 check failure, 2 config parse error,
// 3 validation error.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "vertrace/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vertrace::ConfigValidationError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_kind(const std::string& kind, const std::string& config_path, const std::string& out_dir,
             long seed, bool have_seed, int verbosity) {
  try {
    auto cfg = vertrace::ExperimentConfig::parse(read_file(config_path));
    if (cfg.get_string("kind") != kind)
      throw vertrace::ConfigValidationError("config kind '" + cfg.get_string("kind") +
                                            "' does not match subcommand '" + kind + "'");
    std::optional<std::uint64_t> seed_opt;
    if (have_seed) seed_opt = std::uint64_t(seed);
    auto manifest = vertrace::run_experiment(cfg, out_dir, seed_opt);
    for (const auto& c : manifest.checks) {
      if (verbosity > 0 || !c.pass)
        std::printf("[%s] %-28s value=%.6e tol=%.6e\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.value, c.tolerance);
    }
    if (verbosity > 0)
      std::printf("%s: %zu checks, wall time %.2fs, manifest %s\n", kind.c_str(),
                  manifest.checks.size(), manifest.wall_time_s,
                  manifest.outputs.empty() ? "-" : manifest.outputs.back().c_str());
    return manifest.all_pass() ? 0 : 1;
  } catch (const vertrace::ConfigParseError& e) {
    std::fprintf(stderr, "config parse error: %s\n", e.what());
    return 2;
  } catch (const vertrace::ConfigValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int run_compare(const std::string& path_a, const std::string& path_b, double tol) {
  try {
    auto ma = vertrace::RunManifest::from_json(nlohmann::json::parse(read_file(path_a)));
    auto mb = vertrace::RunManifest::from_json(nlohmann::json::parse(read_file(path_b)));
    if (ma.kind != mb.kind) {
      std::fprintf(stderr, "validation error: experiment kinds differ (%s vs %s)\n",
                   ma.kind.c_str(), mb.kind.c_str());
      return 3;
    }
    auto rep = vertrace::compare_manifests(ma, mb);
    for (const auto& e : rep.entries) {
      if (!e.both_present)
        std::printf("[MISS] %-28s only in one manifest\n", e.name.c_str());
      else
        std::printf("[%s] %-28s a=%.6e b=%.6e diff=%.3e\n", e.diff <= tol ? "OK  " : "DIFF",
                    e.name.c_str(), e.a, e.b, e.diff);
    }
    std::printf("max residual difference: %.3e (tol %.3e)\n", rep.max_diff, tol);
    return rep.within(tol) ? 0 : 1;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config parse error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vertrace: fibered wave/heat trace workbench"};
  app.require_subcommand(1);

  static const char* kinds[] = {"invariants",  "wavetrace", "heattrace", "spa",
                                "pushdown",    "matrixmodel", "ledger"};
  struct SubOpts {
    std::string config;
    std::string out;
    long seed = 0;
    int verbosity = 0;
    CLI::App* sub = nullptr;
  };
  std::map<std::string, SubOpts> opts;
  for (const char* k : kinds) {
    auto& o = opts[k];
    o.sub = app.add_subcommand(k, std::string("run a ") + k + " experiment");
    o.sub->add_option("-c,--config", o.config, "config file path")->required();
    o.sub->add_option("-o,--out", o.out, "output directory override");
    o.sub->add_option("-s,--seed", o.seed, "seed override");
    o.sub->add_flag("-v,--verbose", o.verbosity, "print every check");
  }

  std::string cmp_a, cmp_b;
  double cmp_tol = 1e-12;
  auto* cmp = app.add_subcommand("compare", "compare two run manifests");
  cmp->add_option("a", cmp_a, "first manifest.json")->required();
  cmp->add_option("b", cmp_b, "second manifest.json")->required();
  cmp->add_option("-t,--tol", cmp_tol, "allowed residual difference");

  CLI11_PARSE(app, argc, argv);

  for (const char* k : kinds) {
    auto& o = opts[k];
    if (o.sub->parsed())
      return run_kind(k, o.config, o.out, o.seed, o.sub->count("--seed") > 0, o.verbosity);
  }
  if (cmp->parsed()) return run_compare(cmp_a, cmp_b, cmp_tol);
  return 0;
}
