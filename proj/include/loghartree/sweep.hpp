#ifndef LOGHARTREE_SWEEP_HPP
#define LOGHARTREE_SWEEP_HPP

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "loghartree/scalar.hpp"

namespace loghartree {

// Solve the coupled system along a sorted beta grid. The first point is
// cold-started from the configured Gaussians; later points warm-start from
// the previous converged pair. Scalar references are solved once.
inline SweepResult sweep_beta(const SystemParams& base, const std::vector<double>& beta_list,
                              const GridSpec& spec, const SolverConfig& cfg,
                              const KernelTable& table) {
  if (!std::is_sorted(beta_list.begin(), beta_list.end()))
    throw std::invalid_argument("sweep_beta: beta_list must be sorted ascending");
  ScalarGroundState u1 = solve_scalar(base.lambda1, base.mu1, spec, cfg, table);
  ScalarGroundState u2 = solve_scalar(base.lambda2, base.mu2, spec, cfg, table);
  BetaThresholds th = beta_thresholds(u1.u, u2.u, base);
  SweepResult out;
  bool have_prev = false;
  FieldPair prev;
  for (double beta : beta_list) {
    SystemParams prm = base;
    prm.beta = beta;
    SweepRow row;
    row.beta = beta;
    row.j_semitrivial_u = u1.energy;
    row.j_semitrivial_v = u2.energy;
    row.beta1 = th.beta1;
    row.beta2 = th.beta2;
    try {
      CoupledGroundState st =
          solve_coupled(prm, spec, cfg, table, have_prev ? &prev : nullptr);
      row.c = st.c_level;
      row.semitrivial = st.diagnostics.semitrivial;
      row.iters = st.diagnostics.iterations;
      row.residual = st.diagnostics.rel_residual;
      row.failed = !st.diagnostics.converged && !st.diagnostics.stalled;
      if (row.failed)
        row.note = "did not reach tol_grad";
      else if (st.diagnostics.stalled)
        row.note = "stalled at the residual floor";
      prev = st.pair;
      have_prev = true;
      out.last_state = std::move(st);
    } catch (const std::exception& e) {
      row.failed = true;
      row.note = e.what();
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline SweepResult sweep_beta(const SystemParams& base, const std::vector<double>& beta_list,
                              const GridSpec& spec, const SolverConfig& cfg) {
  KernelTable table(spec);
  return sweep_beta(base, beta_list, spec, cfg, table);
}

}  // namespace loghartree

#endif
