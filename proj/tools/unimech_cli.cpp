#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "unimech/checks.hpp"
#include "unimech/serialization.hpp"

using namespace unimech;
namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string problem;
  std::optional<int> steps;
  std::optional<double> step;
  std::string out = ".";
  unsigned seed = 12345;
  std::string only;
  std::optional<double> rho1, rho2;
  int halvings = 3;
};

int fail(const std::string& code, const std::string& msg, int exit_code) {
  std::cerr << "ERROR:" << code << ": " << msg << "\n";
  return exit_code;
}

int simulate_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvariantViolation:
      return 3;
    default:
      return 2;
  }
}

Example resolve(const RunConfig& cfg) {
  if (cfg.problem.empty()) throw Error(ErrorCode::ConfigError, "--problem is required");
  ProblemSpec spec;
  if (is_example(cfg.problem)) {
    spec.name = cfg.problem;
  } else {
    spec = load_problem_file(cfg.problem);
  }
  if (cfg.rho1) spec.vehicle.rho1 = *cfg.rho1;
  if (cfg.rho2) spec.vehicle.rho2 = *cfg.rho2;
  Example ex = resolve_example(spec);
  if (cfg.step) ex.integrator.step = *cfg.step;
  if (cfg.steps) ex.integrator.n_steps = *cfg.steps;
  return ex;
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::ConfigError, "output directory not writable: " + cfg.out);
  return dir;
}

int cmd_simulate(const RunConfig& cfg) {
  try {
    Example ex = resolve(cfg);
    fs::path dir = out_dir(cfg);
    auto [traj, log] = integrate(ex.system, ex.initial, ex.integrator);
    write_json((dir / "trajectory.json").string(), trajectory_json(ex.system, traj));
    write_text((dir / "invariants.csv").string(), invariants_csv(log));
    std::printf("%s: %d steps, max H drift %.3e, max wc residual %.3e\n", ex.name.c_str(), ex.integrator.n_steps,
                log.max_H_drift(), log.max_wc_residual());
    return 0;
  } catch (const Error& e) {
    return fail(to_string(e.code()), e.what(), simulate_code(e.code()));
  }
}

int cmd_gnh(const RunConfig& cfg) {
  try {
    Example ex = resolve(cfg);
    fs::path dir = out_dir(cfg);
    GnhReport rep = gnh_run(ex.system, gnh_seeds(ex, cfg.seed));
    write_json((dir / "gnh_report.json").string(), gnh_json(ex.system, rep));
    std::printf("%s: %s after %zu level(s)\n", ex.name.c_str(), to_string(rep.status), rep.levels.size());
    for (size_t i = 0; i < rep.levels.size(); ++i)
      std::printf("  level %zu: rank %d, dim %d, new constraints %d\n", i + 1, rep.levels[i].rank, rep.levels[i].dim,
                  rep.levels[i].n_new_constraints);
    switch (rep.status) {
      case GnhStatus::Converged: return 0;
      case GnhStatus::EmptyFinal: return fail("EmptyFinal", "final constraint set is empty", 4);
      case GnhStatus::MaxIterations: return fail("MaxIterations", "constraint algorithm did not stabilize", 5);
    }
    return 0;
  } catch (const Error& e) {
    return fail(to_string(e.code()), e.what(), e.code() == ErrorCode::ConfigError ? 3 : 2);
  }
}

int cmd_ocp(const RunConfig& cfg) {
  try {
    Example ex = resolve(cfg);
    if (!ex.ocp || !ex.boundary) throw Error(ErrorCode::ConfigError, "problem " + ex.name + " has no optimal control form");
    if (!(ex.boundary->bc.T > 0.0)) throw Error(ErrorCode::ConfigError, "horizon must be positive");
    fs::path dir = out_dir(cfg);
    BvpConfig bc;
    if (cfg.steps) bc.n_steps = *cfg.steps;
    BvpResult res = solve_bvp(*ex.ocp, ex.system, ex.boundary->bc, bc, ex.boundary->guess);
    RoundTripReport rt = round_trip(*ex.ocp, ex.system, res);
    write_json((dir / "ocp_trajectory.json").string(), trajectory_json(ex.system, res.traj));
    write_text((dir / "controls.csv").string(), controls_csv(res.traj.times, res.controls));
    json summary = {{"problem", ex.name},
                    {"cost", res.cost},
                    {"iterations", res.iterations},
                    {"terminal_mismatch", res.residual},
                    {"seeds", to_json_vec(res.z)},
                    {"round_trip",
                     {{"force_residual", rt.force_residual},
                      {"constraint_residual", rt.constraint_residual},
                      {"jet_consistency", rt.jet_consistency}}}};
    write_json((dir / "ocp_result.json").string(), summary);
    std::printf("%s: cost %.10g after %d iterations, mismatch %.3e, round-trip force residual %.3e\n", ex.name.c_str(),
                res.cost, res.iterations, res.residual, rt.force_residual);
    return 0;
  } catch (const ShootingDiverged& e) {
    return fail("ShootingDiverged", std::string(e.what()) + " (best mismatch " + std::to_string(e.best_residual) + ")", 6);
  } catch (const Error& e) {
    return fail(to_string(e.code()), e.what(), e.code() == ErrorCode::ConfigError ? 3 : 6);
  }
}

int cmd_check(const RunConfig& cfg) {
  CheckOptions opts;
  opts.seed = cfg.seed;
  opts.rho1 = cfg.rho1;
  opts.rho2 = cfg.rho2;
  opts.halvings = cfg.halvings;
  if (opts.halvings < 1) return fail("ConfigError", "--halvings must be at least 1", 3);
  bool matched = cfg.only.empty();
  int failures = 0;
  for (const auto& entry : check_registry()) {
    if (!cfg.only.empty() && entry.name != cfg.only) continue;
    matched = true;
    CheckResult r = run_check(entry, opts);
    std::printf("%-4s %d %-12s %s [%.2f s]\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(),
                r.seconds);
    std::fflush(stdout);
    failures += r.passed ? 0 : 1;
  }
  if (!matched) return fail("ConfigError", "unknown check: " + cfg.only, 3);
  if (failures > 0) return fail("CheckFailed", std::to_string(failures) + " check(s) failed", 1);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unified higher-order mechanics on trivial principal bundles"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto add_common = [&](CLI::App* sub, bool integration) {
    sub->add_option("--problem", cfg.problem, "example name or JSON problem file");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--seed", cfg.seed, "seed for random sampling");
    sub->add_option("--rho1", cfg.rho1, "vehicle cost weight rho1");
    sub->add_option("--rho2", cfg.rho2, "vehicle cost weight rho2");
    if (integration) {
      sub->add_option("--steps", cfg.steps, "number of integration steps");
      sub->add_option("--step", cfg.step, "integration step");
    }
  };
  auto* sim = app.add_subcommand("simulate", "integrate an example and write trajectory and invariants");
  add_common(sim, true);
  auto* gnh = app.add_subcommand("gnh", "run the constraint algorithm");
  add_common(gnh, false);
  auto* ocp = app.add_subcommand("ocp", "solve an optimal control boundary value problem");
  add_common(ocp, false);
  ocp->add_option("--steps", cfg.steps, "shooting grid size");
  auto* chk = app.add_subcommand("check", "run the invariant and oracle suite");
  chk->add_option("--only", cfg.only, "run a single check by name");
  chk->add_option("--seed", cfg.seed, "seed for random sampling");
  chk->add_option("--rho1", cfg.rho1, "vehicle cost weight rho1");
  chk->add_option("--rho2", cfg.rho2, "vehicle cost weight rho2");
  chk->add_option("--halvings", cfg.halvings, "step halvings for order checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ERROR:ConfigError: " << e.what() << "\n";
    return 3;
  }
  if (*sim) return cmd_simulate(cfg);
  if (*gnh) return cmd_gnh(cfg);
  if (*ocp) return cmd_ocp(cfg);
  if (*chk) return cmd_check(cfg);
  return 3;
}
