#ifndef LOGHARTREE_SOLVER_HPP
#define LOGHARTREE_SOLVER_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "loghartree/nehari.hpp"

namespace loghartree {

struct GaussianInit {
  double amplitude = 1.0;
  double center_x = 0.0;
  double center_y = 0.0;
  double sigma = 0.0;  // 0 = auto: 1/sqrt(lambda) of the component
};

struct SolverConfig {
  int max_iters = 20000;
  double tol_grad = 1e-8;    // stop when ||r|| / ||(u,v)|| falls below
  double tol_nehari = 1e-8;  // accepted iterates keep |N| below tol * H^2
  double ls_shrink = 0.5;
  double ls_c1 = 1e-4;
  GaussianInit init_u;
  // The v amplitude is deliberately off 1: an exactly u<->v symmetric start
  // would never leave the symmetric subspace, which is a trap below the
  // coupling thresholds where the minimizer is semitrivial.
  GaussianInit init_v{0.9, 0.0, 0.0, 0.0};
  std::uint64_t seed = 42;
  int multistart = 1;
  int recenter_every = 10;  // 0 disables center-of-mass recentering
};

struct SolveDiagnostics {
  int iterations = 0;
  double rel_residual = 0;
  double rel_residual_u = 0;
  double rel_residual_v = 0;
  double nehari_defect = 0;  // |N| / H^2 at the returned state
  bool converged = false;
  bool stalled = false;  // progress hit the floating-point floor before tol_grad
  bool semitrivial = false;
  bool fiber_multiple_roots = false;
  double hnorm_floor = std::numeric_limits<double>::infinity();
  double runtime_seconds = 0;
};

struct CoupledGroundState {
  FieldPair pair;
  SystemParams params;
  double c_level = 0;
  EnergyBreakdown breakdown;
  SolveDiagnostics diagnostics;
};

namespace detail {

struct EngineState {
  FieldPair p;
  PairPotentials pot;
  double h2 = 0;
  double j = 0;
};

class NehariMinimizer {
 public:
  using AnalyticDilate = std::function<FieldPair(double)>;

  NehariMinimizer(const SystemParams& prm, const KernelTable& table, const SolverConfig& cfg,
                  bool two_components, AnalyticDilate analytic_dilate = {})
      : prm_(prm), table_(table), cfg_(cfg), two_(two_components),
        analytic_dilate_(std::move(analytic_dilate)) {}

  SolveDiagnostics run(FieldPair init, FieldPair* out) {
    auto t_start = std::chrono::steady_clock::now();
    SolveDiagnostics diag;
    EngineState s;
    if (!try_project(init, s)) {
      // Nonnegative a0: concentrate along the fiber until the amplitude
      // projection applies. The fiber root is the first candidate; on coarse
      // grids the sampled dilation can land short of the a0 < 0 region, so
      // keep concentrating.
      FiberRoot root = fiber_root(fiber_coeffs(init, prm_, table_));
      diag.fiber_multiple_roots = root.multiple_roots;
      double t0 = root.t0;
      bool projected = false;
      for (int attempt = 0; attempt < 40 && !projected; ++attempt) {
        FieldPair cand = analytic_dilate_
                             ? analytic_dilate_(t0)
                             : FieldPair(dilate(init.u, t0), dilate(init.v, t0));
        projected = try_project(std::move(cand), s);
        t0 *= 2.0;
      }
      if (!projected) {
        // Very coarse grids: every off-diagonal kernel entry can be positive
        // (h beyond the log-kernel sign change), so only near-single-cell
        // densities reach a0 < 0. Start from one.
        const GridSpec& spec = init.spec();
        int mid = spec.points_per_side / 2;
        Field su(spec), sv(spec);
        su.at(mid, mid) = 1.0;
        if (two_) sv.at(mid, mid) = 1.0;
        projected = try_project(FieldPair(std::move(su), std::move(sv)), s);
      }
      if (!projected)
        throw std::runtime_error("solver: dilation projection did not reach the a0 < 0 region");
    }
    Field ru, rv;
    double rn2 = residual(s, ru, rv);
    Field prev_du, prev_dv, step_u, step_v;
    bool have_prev = false;
    double alpha_bb = 1.0;
    double best_rn2 = rn2;
    int since_best = 0;
    int it = 0;
    for (it = 1; it <= cfg_.max_iters; ++it) {
      double denom = l2_norm_sq(s.p.u) + l2_norm_sq(s.p.v);
      double relr = std::sqrt(rn2 / denom);
      if (!std::isfinite(relr) || !std::isfinite(s.j))
        throw std::runtime_error("solver: non-finite iterate at iteration " + std::to_string(it));
      diag.hnorm_floor = std::min(diag.hnorm_floor, s.h2);
      if (relr <= cfg_.tol_grad) {
        diag.converged = true;
        break;
      }
      // Progress guard: under-resolved grids leave a rough lattice-pinned
      // landscape where the residual plateaus far above tol_grad; stop
      // grinding once no real headway has been made for a while.
      if (rn2 < 0.98 * best_rn2) {
        best_rn2 = rn2;
        since_best = 0;
      } else if (++since_best >= 100) {
        diag.stalled = true;
        break;
      }
      // H-preconditioned residual, projected off the amplitude fiber.
      Field gu = helmholtz_inverse(ru, prm_.lambda1);
      Field gv = two_ ? helmholtz_inverse(rv, prm_.lambda2) : Field(s.p.spec());
      double theta = (inner_l2(gu, s.p.u) + inner_l2(gv, s.p.v)) / denom;
      Field du = gu, dv = gv;
      axpy(du, -theta, s.p.u);
      if (two_) axpy(dv, -theta, s.p.v);
      double slope = inner_l2(ru, du) + inner_l2(rv, dv);
      if (slope <= 0.0) {
        du = gu;
        dv = gv;
        slope = inner_l2(ru, du) + inner_l2(rv, dv);
      }
      if (have_prev) {
        // Barzilai-Borwein 1 in the preconditioned metric:
        // s = x_k - x_{k-1}, y = d_k - d_{k-1}, alpha = <s,s>/<s,y>.
        double ss = inner_l2(step_u, step_u) + inner_l2(step_v, step_v);
        double sy = (inner_l2(step_u, du) + inner_l2(step_v, dv)) -
                    (inner_l2(step_u, prev_du) + inner_l2(step_v, prev_dv));
        if (sy > 0.0)
          alpha_bb = std::clamp(ss / sy, 1e-3, 1e3);
        else
          alpha_bb = 1.0;
      }
      double alpha = alpha_bb;
      double jref = s.j;  // monotone reference: J never increases along accepted steps
      double noise = 1e-13 * std::abs(s.j);
      bool accepted = false;
      EngineState trial;
      Field rut, rvt;
      double rt2 = 0;
      bool trial_has_resid = false;
      for (int ls = 0; ls < 60; ++ls) {
        FieldPair cand = stepped_abs(s.p, du, dv, alpha);
        trial_has_resid = false;
        if (try_project(std::move(cand), trial)) {
          if (trial.j <= jref - cfg_.ls_c1 * alpha * slope) {
            accepted = true;
            break;
          }
          if (cfg_.ls_c1 * alpha * slope < noise) {
            rt2 = residual(trial, rut, rvt);
            trial_has_resid = true;
            if (rt2 < rn2 && trial.j <= jref + noise) {
              accepted = true;
              break;
            }
          }
        }
        alpha *= cfg_.ls_shrink;
      }
      if (!accepted) {
        diag.stalled = true;
        break;
      }
      step_u = trial.p.u;
      axpy(step_u, -1.0, s.p.u);
      if (two_) {
        step_v = trial.p.v;
        axpy(step_v, -1.0, s.p.v);
      } else {
        step_v = Field(s.p.spec());
      }
      prev_du = std::move(du);
      prev_dv = std::move(dv);
      have_prev = true;
      s = std::move(trial);
      if (trial_has_resid) {
        ru = std::move(rut);
        rv = std::move(rvt);
        rn2 = rt2;
      } else {
        rn2 = residual(s, ru, rv);
      }

      if (cfg_.recenter_every > 0 && it % cfg_.recenter_every == 0 && recenter(s)) {
        rn2 = residual(s, ru, rv);

        have_prev = false;
        alpha_bb = 1.0;
      }
    }
    diag.iterations = std::min(it, cfg_.max_iters);
    if (cfg_.recenter_every > 0) recenter(s);
    finalize(s);
    rn2 = residual(s, ru, rv);
    double mu_mass = l2_norm_sq(s.p.u), mv_mass = l2_norm_sq(s.p.v);
    diag.rel_residual = std::sqrt(rn2 / (mu_mass + mv_mass));
    diag.rel_residual_u = mu_mass > 0 ? std::sqrt(l2_norm_sq(ru) / mu_mass) : 0.0;
    diag.rel_residual_v = mv_mass > 0 ? std::sqrt(l2_norm_sq(rv) / mv_mass) : 0.0;
    if (diag.converged && diag.rel_residual > cfg_.tol_grad)
      diag.converged = diag.rel_residual <= 10.0 * cfg_.tol_grad;
    diag.nehari_defect = std::abs(s.h2 + s.pot.a0) / s.h2;
    diag.converged = diag.converged && diag.nehari_defect <= cfg_.tol_nehari;
    if (two_) {
      double lo = std::min(mu_mass, mv_mass), hi = std::max(mu_mass, mv_mass);
      diag.semitrivial = hi > 0 && lo / hi < 1e-6;
    }
    diag.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    *out = std::move(s.p);
    return diag;
  }

 private:
  static void axpy(Field& y, double a, const Field& x) {
    for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += a * x.values[i];
  }

  FieldPair stepped_abs(const FieldPair& p, const Field& du, const Field& dv, double alpha) {
    Field u = p.u, v = p.v;
    for (std::size_t i = 0; i < u.values.size(); ++i)
      u.values[i] = std::abs(u.values[i] - alpha * du.values[i]);
    if (two_)
      for (std::size_t i = 0; i < v.values.size(); ++i)
        v.values[i] = std::abs(v.values[i] - alpha * dv.values[i]);
    return FieldPair(std::move(u), std::move(v));
  }

  // Amplitude projection onto the Nehari set; fills the engine state with the
  // scaled pair and consistently scaled potentials. False when a0 >= 0.
  bool try_project(FieldPair cand, EngineState& out) {
    PairPotentials pot = two_ ? assemble_potentials(cand, prm_, table_)
                              : scalar_potentials(cand);
    if (!(pot.a0 < 0.0)) return false;
    double h2 = two_ ? h_norm_sq(cand, prm_)
                     : grad_norm_sq(cand.u) + prm_.lambda1 * l2_norm_sq(cand.u);
    double s = std::sqrt(-h2 / pot.a0);
    for (double& x : cand.u.values) x *= s;
    if (two_)
      for (double& x : cand.v.values) x *= s;
    double s2 = s * s, s4 = s2 * s2;
    for (double& x : pot.w_u.values) x *= s2;
    for (double& x : pot.w_v.values) x *= s2;
    pot.i_uu *= s4;
    pot.i_vv *= s4;
    pot.i_uv *= s4;
    pot.a0 *= s4;
    out.p = std::move(cand);
    out.pot = std::move(pot);
    out.h2 = h2 * s2;
    out.j = 0.5 * out.h2 + 0.25 * out.pot.a0;
    return true;
  }

  PairPotentials scalar_potentials(const FieldPair& p) {
    PairPotentials pot;
    Field uu(p.spec());
    for (std::size_t i = 0; i < uu.values.size(); ++i)
      uu.values[i] = p.u.values[i] * p.u.values[i];
    pot.w_u = log_potential(uu, table_);
    pot.w_v = Field(p.spec());
    pot.i_uu = -inner_l2(pot.w_u, uu);
    pot.a0 = prm_.mu1 * pot.i_uu;
    return pot;
  }

  double residual(const EngineState& s, Field& ru, Field& rv) {
    auto pair = el_residual_from(s.p, prm_, s.pot);
    ru = std::move(pair.first);
    rv = two_ ? std::move(pair.second) : Field(s.p.spec());
    return l2_norm_sq(ru) + l2_norm_sq(rv);
  }

  bool recenter(EngineState& s) {
    const GridSpec& spec = s.p.spec();
    int n = spec.points_per_side;
    double m = 0, cx = 0, cy = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double d = s.p.u.at(i, j) * s.p.u.at(i, j) + s.p.v.at(i, j) * s.p.v.at(i, j);
        m += d;
        cx += spec.node(i) * d;
        cy += spec.node(j) * d;
      }
    if (m <= 0) return false;
    cx /= m;
    cy /= m;
    if (std::max(std::abs(cx), std::abs(cy)) <= 1e-13) return false;
    Field u = shift_to_origin(s.p.u, cx, cy);
    Field v = two_ ? shift_to_origin(s.p.v, cx, cy) : Field(spec);
    for (double& x : u.values) x = std::abs(x);
    if (two_)
      for (double& x : v.values) x = std::abs(x);
    EngineState ns;
    if (!try_project(FieldPair(std::move(u), std::move(v)), ns)) return false;
    s = std::move(ns);
    return true;
  }

  void finalize(EngineState& s) {
    for (double& x : s.p.u.values) x = std::abs(x);
    if (two_)
      for (double& x : s.p.v.values) x = std::abs(x);
    EngineState ns;
    if (try_project(FieldPair(s.p.u, s.p.v), ns)) s = std::move(ns);
  }

  const SystemParams& prm_;
  const KernelTable& table_;
  const SolverConfig& cfg_;
  bool two_;
  AnalyticDilate analytic_dilate_;
};

inline Field gaussian_field(const GridSpec& spec, const GaussianInit& g, double lambda_auto) {
  double sigma = g.sigma > 0 ? g.sigma : 1.0 / std::sqrt(lambda_auto);
  return Field::sampled(spec, [&](double x, double y) {
    double dx = x - g.center_x, dy = y - g.center_y;
    return g.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
  });
}

// The dilation u -> t^2 u(tx) of a Gaussian is again a Gaussian; rebuilding
// it from scaled parameters keeps the initial fiber projection exact even on
// grids too coarse for interpolated dilation.
inline GaussianInit dilated_init(const GaussianInit& g, double lambda_auto, double t) {
  GaussianInit out = g;
  out.amplitude = g.amplitude * t * t;
  out.center_x = g.center_x / t;
  out.center_y = g.center_y / t;
  out.sigma = (g.sigma > 0 ? g.sigma : 1.0 / std::sqrt(lambda_auto)) / t;
  return out;
}

}  // namespace detail

// Ground state of the coupled system by Nehari-constrained minimization.
// Optional explicit initial pair overrides the Gaussian init (warm starts).
inline CoupledGroundState solve_coupled(const SystemParams& prm, const GridSpec& spec,
                                        const SolverConfig& cfg, const KernelTable& table,
                                        const FieldPair* warm_start = nullptr) {
  prm.validate();
  auto run_once = [&](const SolverConfig& c) {
    detail::NehariMinimizer::AnalyticDilate rebuild;
    if (!warm_start)
      rebuild = [&spec, &prm, c](double t) {
        return FieldPair(
            detail::gaussian_field(spec, detail::dilated_init(c.init_u, prm.lambda1, t),
                                   prm.lambda1),
            detail::gaussian_field(spec, detail::dilated_init(c.init_v, prm.lambda2, t),
                                   prm.lambda2));
      };
    detail::NehariMinimizer engine(prm, table, c, /*two_components=*/true, rebuild);
    FieldPair init =
        warm_start ? *warm_start
                   : FieldPair(detail::gaussian_field(spec, c.init_u, prm.lambda1),
                               detail::gaussian_field(spec, c.init_v, prm.lambda2));
    CoupledGroundState st;
    st.params = prm;
    st.diagnostics = engine.run(std::move(init), &st.pair);
    st.breakdown = j_energy(st.pair, prm, table);
    st.c_level = st.breakdown.j;
    return st;
  };
  CoupledGroundState best = run_once(cfg);
  if (cfg.multistart > 1 && warm_start == nullptr) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5), scale(0.8, 1.25);
    for (int k = 1; k < cfg.multistart; ++k) {
      SolverConfig c = cfg;
      c.init_u.center_x += jitter(rng);
      c.init_u.center_y += jitter(rng);
      c.init_v.center_x += jitter(rng);
      c.init_v.center_y += jitter(rng);
      c.init_u.amplitude *= scale(rng);
      c.init_v.amplitude *= scale(rng);
      CoupledGroundState cand = run_once(c);
      if (cand.diagnostics.converged &&
          (!best.diagnostics.converged || cand.c_level < best.c_level))
        best = std::move(cand);
    }
  }
  return best;
}

inline CoupledGroundState solve_coupled(const SystemParams& prm, const GridSpec& spec,
                                        const SolverConfig& cfg) {
  KernelTable table(spec);
  return solve_coupled(prm, spec, cfg, table);
}

struct SweepRow {
  double beta = 0;
  double c = 0;
  double j_semitrivial_u = 0;  // J(u1, 0)
  double j_semitrivial_v = 0;  // J(0, u2)
  double beta1 = 0, beta2 = 0;
  bool semitrivial = false;
  int iters = 0;
  double residual = 0;
  bool failed = false;
  std::string note;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  CoupledGroundState last_state;  // final beta's state (for inspection)
};

}  // namespace loghartree

#endif
