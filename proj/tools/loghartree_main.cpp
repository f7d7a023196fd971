// Command-line driver: ground-state solves, beta sweeps, verification and
// oracle self-tests for the 2D coupled logarithmic Hartree system.
//
// Exit codes: 0 = run + checks passed, 1 = a verification check failed,
// 2 = configuration or solver failure.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "loghartree/analysis.hpp"
#include "loghartree/config.hpp"
#include "loghartree/parallel.hpp"
#include "loghartree/state_io.hpp"
#include "loghartree/sweep.hpp"
#include "loghartree/version.hpp"

namespace lgh = loghartree;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  int grid_n = 0;
  double box_l = 0.0;
};

lgh::RunConfig resolve_config(const CommonOpts& opts) {
  lgh::RunConfig cfg;
  if (!opts.config_path.empty()) cfg = lgh::load_config(opts.config_path);
  if (opts.grid_n > 0) cfg.grid_n = opts.grid_n;
  if (opts.box_l > 0.0) cfg.box_l = opts.box_l;
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (opts.threads > 0) lgh::par::set_thread_count(opts.threads);
  cfg.validate();
  return cfg;
}

void write_manifest(const lgh::RunConfig& cfg, const std::string& dir,
                    const std::string& command, double seconds) {
  lgh::io::ordered_json m;
  m["command"] = command;
  m["version"] = lgh::version_string;
  m["config"] = lgh::config_to_json(cfg);
  m["grid"] = {{"N", cfg.grid_n}, {"L", cfg.resolved_l()}};
  m["threads"] = lgh::par::thread_count();
  m["runtime_seconds"] = seconds;
  lgh::io::write_json(m, dir + "/manifest.json");
}

int cmd_scalar(const CommonOpts& opts) {
  auto t0 = std::chrono::steady_clock::now();
  lgh::RunConfig cfg = resolve_config(opts);
  std::filesystem::create_directories(cfg.output_dir);
  lgh::GridSpec spec = cfg.grid();
  lgh::KernelTable table(spec);
  lgh::ScalarGroundState st =
      lgh::solve_scalar(cfg.params.lambda1, cfg.params.mu1, spec, cfg.solver, table);
  lgh::save_state(st, cfg.output_dir);
  lgh::VerificationReport rep = lgh::verify(st, table);
  lgh::emit_report(rep, cfg.output_dir + "/report.json");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, cfg.output_dir, "scalar", secs);
  std::printf("scalar: lambda=%g mu=%g J=%.12g residual=%.3e iters=%d %s\n",
              st.lambda, st.mu, st.energy, st.el_residual_norm, st.diagnostics.iterations,
              rep.pass ? "checks-pass" : "CHECKS-FAIL");
  if (!st.diagnostics.converged && !st.diagnostics.stalled) return 2;
  return rep.pass ? 0 : 1;
}

int cmd_thresholds(const CommonOpts& opts) {
  auto t0 = std::chrono::steady_clock::now();
  lgh::RunConfig cfg = resolve_config(opts);
  std::filesystem::create_directories(cfg.output_dir);
  lgh::GridSpec spec = cfg.grid();
  lgh::KernelTable table(spec);
  lgh::ScalarGroundState u1 =
      lgh::solve_scalar(cfg.params.lambda1, cfg.params.mu1, spec, cfg.solver, table);
  lgh::ScalarGroundState u2 =
      lgh::solve_scalar(cfg.params.lambda2, cfg.params.mu2, spec, cfg.solver, table);
  lgh::BetaThresholds th = lgh::beta_thresholds(u1.u, u2.u, cfg.params);
  lgh::save_state(u1, cfg.output_dir + "/u1");
  lgh::save_state(u2, cfg.output_dir + "/u2");
  lgh::io::ordered_json j;
  j["beta1"] = th.beta1;
  j["beta2"] = th.beta2;
  j["b1_u1"] = th.b1_u1;
  j["b2_u1"] = th.b2_u1;
  j["b1_u2"] = th.b1_u2;
  j["b2_u2"] = th.b2_u2;
  j["j_u1"] = u1.energy;
  j["j_u2"] = u2.energy;
  lgh::io::write_json(j, cfg.output_dir + "/thresholds.json");
  {
    std::vector<double> rho_grid;
    for (double rho = 0.0; rho <= 1.0 + 1e-12; rho += 0.02) rho_grid.push_back(rho);
    auto rows = lgh::h_curve(u1.u, rho_grid, cfg.params, table);
    std::vector<std::vector<double>> csv;
    for (const auto& r : rows) csv.push_back({r.rho, r.t_rho, r.h_rho, r.j_direct});
    lgh::io::write_csv(cfg.output_dir + "/hcurve.csv", {"rho", "t_rho", "h_rho", "j_direct"},
                       csv);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, cfg.output_dir, "thresholds", secs);
  std::printf("thresholds: beta1=%.12g beta2=%.12g (b1_u1=%.10g b2_u1=%.10g b1_u2=%.10g b2_u2=%.10g)\n",
              th.beta1, th.beta2, th.b1_u1, th.b2_u1, th.b1_u2, th.b2_u2);
  bool ok = u1.diagnostics.converged || u1.diagnostics.stalled;
  ok = ok && (u2.diagnostics.converged || u2.diagnostics.stalled);
  return ok ? 0 : 2;
}

int cmd_coupled(const CommonOpts& opts) {
  auto t0 = std::chrono::steady_clock::now();
  lgh::RunConfig cfg = resolve_config(opts);
  std::filesystem::create_directories(cfg.output_dir);
  lgh::GridSpec spec = cfg.grid();
  lgh::KernelTable table(spec);
  lgh::CoupledGroundState st = lgh::solve_coupled(cfg.params, spec, cfg.solver, table);
  lgh::save_state(st, cfg.output_dir);
  lgh::ScalarGroundState u1 =
      lgh::solve_scalar(cfg.params.lambda1, cfg.params.mu1, spec, cfg.solver, table);
  lgh::ScalarGroundState u2 =
      lgh::solve_scalar(cfg.params.lambda2, cfg.params.mu2, spec, cfg.solver, table);
  lgh::VerificationReport rep = lgh::verify(st, &u1, &u2, table);
  lgh::emit_report(rep, cfg.output_dir + "/report.json");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, cfg.output_dir, "coupled", secs);
  std::printf("coupled: beta=%g c=%.12g residual=%.3e iters=%d%s %s\n", cfg.params.beta,
              st.c_level, st.diagnostics.rel_residual, st.diagnostics.iterations,
              st.diagnostics.semitrivial ? " [semitrivial]" : "",
              rep.pass ? "checks-pass" : "CHECKS-FAIL");
  if (!st.diagnostics.converged && !st.diagnostics.stalled) return 2;
  if (st.diagnostics.semitrivial) return 0;  // informative outcome, not an error
  return rep.pass ? 0 : 1;
}

int cmd_sweep(const CommonOpts& opts) {
  auto t0 = std::chrono::steady_clock::now();
  lgh::RunConfig cfg = resolve_config(opts);
  if (cfg.sweep_betas.empty())
    throw std::invalid_argument("config: sweep.betas is required for the sweep command");
  std::filesystem::create_directories(cfg.output_dir);
  lgh::GridSpec spec = cfg.grid();
  lgh::KernelTable table(spec);
  lgh::SweepResult res = lgh::sweep_beta(cfg.params, cfg.sweep_betas, spec, cfg.solver, table);
  std::vector<std::vector<double>> rows;
  for (const auto& r : res.rows)
    rows.push_back({r.beta, r.c, r.j_semitrivial_u, r.j_semitrivial_v, r.beta1, r.beta2,
                    r.semitrivial ? 1.0 : 0.0, static_cast<double>(r.iters), r.residual});
  lgh::io::write_csv(cfg.output_dir + "/sweep.csv",
                     {"beta", "c", "j_semitrivial_u", "j_semitrivial_v", "beta1", "beta2",
                      "semitrivial_flag", "iters", "residual"},
                     rows);
  lgh::save_state(res.last_state, cfg.output_dir + "/last_state");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, cfg.output_dir, "sweep", secs);
  int failures = 0;
  for (const auto& r : res.rows) {
    std::printf("beta=%.6g c=%.10g semitrivial=%d iters=%d residual=%.2e%s%s\n", r.beta, r.c,
                r.semitrivial ? 1 : 0, r.iters, r.residual, r.failed ? " FAILED: " : "",
                r.failed ? r.note.c_str() : "");
    failures += r.failed ? 1 : 0;
  }
  return failures == 0 ? 0 : 2;
}

int cmd_verify(const CommonOpts& opts, const std::vector<std::string>& state_dirs) {
  auto t0 = std::chrono::steady_clock::now();
  lgh::RunConfig cfg;
  if (!opts.config_path.empty()) cfg = lgh::load_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (opts.threads > 0) lgh::par::set_thread_count(opts.threads);
  bool all_pass = true;
  for (const std::string& dir : state_dirs) {
    lgh::LoadedState ls = lgh::load_state(dir);
    lgh::KernelTable table(ls.pair.spec());
    lgh::VerificationReport rep =
        lgh::verify_pair(ls.pair, ls.params, table, lgh::VerifyTolerances{}, nullptr, nullptr,
                         ls.coupled);
    lgh::emit_report(rep, dir + "/verify_report.json");
    std::printf("verify %s: %s\n", dir.c_str(), rep.pass ? "pass" : "FAIL");
    for (const auto& c : rep.checks)
      if (!c.pass)
        std::printf("  check %s: defect=%.3e tolerance=%.3e\n", c.name.c_str(), c.defect,
                    c.tolerance);
    all_pass = all_pass && rep.pass;
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(cfg, dir, "verify", secs);
  }
  return all_pass ? 0 : 1;
}

int cmd_selftest(const CommonOpts& opts) {
  auto t0 = std::chrono::steady_clock::now();
  if (opts.threads > 0) lgh::par::set_thread_count(opts.threads);
  int failures = 0;
  auto report = [&](const char* name, bool ok, double defect, double tol) {
    std::printf("[%s] %s defect=%.3e tol=%.1e\n", ok ? "ok" : "FAIL", name, defect, tol);
    failures += ok ? 0 : 1;
  };

  {  // kernel FFT path against the direct quadrature oracle
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    for (int n : {8, 12, 16}) {
      lgh::GridSpec g = lgh::make_grid(1.5, n);
      lgh::KernelTable table(g);
      for (int trial = 0; trial < 4; ++trial) {
        lgh::Field f(g), h(g);
        for (double& v : f.values) v = unif(rng);
        for (double& v : h.values) v = unif(rng);
        double fast = lgh::i0(f, h, table);
        double slow = lgh::direct_i0_oracle(f, h, g);
        worst = std::max(worst, std::abs(fast - slow) / std::abs(slow));
      }
    }
    report("kernel_oracle", worst <= 1e-12, worst, 1e-12);
  }

  {  // fiber expansion identity on analytic Gaussian pairs
    lgh::GridSpec g = lgh::make_grid(12.0, 256);
    lgh::KernelTable table(g);
    lgh::SystemParams prm;
    prm.beta = 2.0;
    auto pair_at = [&](double t) {
      lgh::Field u = lgh::Field::sampled(g, [t](double x, double y) {
        return t * t * std::exp(-0.5 * t * t * (x * x + y * y));
      });
      lgh::Field v = lgh::Field::sampled(g, [t](double x, double y) {
        return 0.8 * t * t * std::exp(-0.35 * t * t * (x * x + y * y));
      });
      return lgh::FieldPair(std::move(u), std::move(v));
    };
    lgh::FieldPair base = pair_at(1.0);
    lgh::FiberCoefficients coeff = lgh::fiber_coeffs(base, prm, table);
    double worst = 0.0;
    for (double t : {0.5, 0.8, 1.25, 2.0}) {
      double closed = lgh::fiber_value(coeff, t);
      lgh::EnergyBreakdown b = lgh::j_energy(pair_at(t), prm, table);
      worst = std::max(worst, std::abs(closed - b.n) / (1.0 + std::abs(closed)));
    }
    report("fiber_identity", worst <= 1e-8, worst, 1e-8);
  }

  {  // gradient of J against central differences
    lgh::GridSpec g = lgh::make_grid(8.0, 64);
    lgh::KernelTable table(g);
    lgh::SystemParams prm;
    prm.lambda2 = 2.0;
    prm.beta = 1.5;
    lgh::FieldPair pair(
        lgh::Field::sampled(g, [](double x, double y) { return std::exp(-0.6 * (x * x + y * y)); }),
        lgh::Field::sampled(g, [](double x, double y) {
          return 0.7 * std::exp(-0.5 * ((x - 0.3) * (x - 0.3) + y * y));
        }));
    auto [ru, rv] = lgh::el_residual(pair, prm, table);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    double eps = 1e-4;
    for (int dir = 0; dir < 10; ++dir) {
      lgh::Field qu(g), qv(g);
      for (double& v : qu.values) v = normal(rng);
      for (double& v : qv.values) v = normal(rng);
      for (int i = 0; i < g.points_per_side; ++i)
        for (int j = 0; j < g.points_per_side; ++j) {
          double x = g.node(i), y = g.node(j);
          double damp = std::exp(-0.25 * (x * x + y * y));
          qu.at(i, j) *= damp;
          qv.at(i, j) *= damp;
        }
      auto perturbed = [&](double sgn) {
        lgh::FieldPair p = pair;
        for (std::size_t s = 0; s < p.u.values.size(); ++s) {
          p.u.values[s] += sgn * eps * qu.values[s];
          p.v.values[s] += sgn * eps * qv.values[s];
        }
        return lgh::j_energy(p, prm, table).j;
      };
      double fd = (perturbed(1.0) - perturbed(-1.0)) / (2.0 * eps);
      double pred = lgh::inner_l2(ru, qu) + lgh::inner_l2(rv, qv);
      worst = std::max(worst, std::abs(fd - pred) / std::abs(fd));
    }
    report("gradient_check", worst <= 1e-6, worst, 1e-6);
  }

  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("selftest %s in %.1f s\n", failures == 0 ? "passed" : "FAILED", secs);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of the 2D coupled logarithmic Hartree system"};
  app.set_version_flag("--version", lgh::version_string);
  CommonOpts opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON run configuration");
    sub->add_option("--out", opts.out_dir, "output directory (overrides config)");
    sub->add_option("--threads", opts.threads, "cap for data-parallel width");
    sub->add_option("--grid-n", opts.grid_n, "grid points per side (overrides config)");
    sub->add_option("--box", opts.box_l, "box half-width L (overrides config)");
  };

  CLI::App* scalar = app.add_subcommand("scalar", "solve the single-equation ground state");
  add_common(scalar);
  CLI::App* thresholds =
      app.add_subcommand("thresholds", "solve u1, u2 and print the coupling thresholds");
  add_common(thresholds);
  CLI::App* coupled = app.add_subcommand("coupled", "solve the coupled ground state");
  add_common(coupled);
  CLI::App* sweep = app.add_subcommand("sweep", "solve along a beta grid (warm-started)");
  add_common(sweep);
  CLI::App* verify = app.add_subcommand("verify", "re-verify saved states");
  std::vector<std::string> state_dirs;
  verify->add_option("states", state_dirs, "state directories")->required();
  add_common(verify);
  CLI::App* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");
  add_common(selftest);
  app.require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (scalar->parsed()) return cmd_scalar(opts);
    if (thresholds->parsed()) return cmd_thresholds(opts);
    if (coupled->parsed()) return cmd_coupled(opts);
    if (sweep->parsed()) return cmd_sweep(opts);
    if (verify->parsed()) return cmd_verify(opts, state_dirs);
    if (selftest->parsed()) return cmd_selftest(opts);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
