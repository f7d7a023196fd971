#ifndef LOGHARTREE_SCALAR_HPP
#define LOGHARTREE_SCALAR_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "loghartree/solver.hpp"
#include "loghartree/stats.hpp"

namespace loghartree {

struct ScalarGroundState {
  Field u;
  double lambda = 1.0;
  double mu = 1.0;
  double energy = 0;            // J(u, 0)
  double nehari_defect = 0;     // |grad^2 + lambda m + mu I0| / (grad^2 + lambda m)
  double el_residual_norm = 0;  // ||r_u||_2 / ||u||_2
  double l2_mass = 0;
  double grad_energy = 0;
  double i0_uu = 0;
  SolveDiagnostics diagnostics;
};

// Ground state of the single logarithmic equation for (lambda, mu).
inline ScalarGroundState solve_scalar(double lambda, double mu, const GridSpec& spec,
                                      const SolverConfig& cfg, const KernelTable& table) {
  if (!(lambda > 0 && mu > 0))
    throw std::invalid_argument("solve_scalar: lambda and mu must be > 0");
  SystemParams prm;
  prm.lambda1 = prm.lambda2 = lambda;
  prm.mu1 = prm.mu2 = mu;
  prm.beta = 1.0;  // multiplies only cross terms, which vanish with v = 0
  auto rebuild = [&spec, lambda, &cfg](double t) {
    return FieldPair(
        detail::gaussian_field(spec, detail::dilated_init(cfg.init_u, lambda, t), lambda),
        Field(spec));
  };
  detail::NehariMinimizer engine(prm, table, cfg, /*two_components=*/false, rebuild);
  FieldPair init(detail::gaussian_field(spec, cfg.init_u, lambda), Field(spec));
  ScalarGroundState st;
  FieldPair out;
  st.diagnostics = engine.run(std::move(init), &out);
  st.u = std::move(out.u);
  st.lambda = lambda;
  st.mu = mu;
  st.l2_mass = l2_norm_sq(st.u);
  st.grad_energy = grad_norm_sq(st.u);
  Field uu(spec);
  for (std::size_t i = 0; i < uu.values.size(); ++i) uu.values[i] = st.u.values[i] * st.u.values[i];
  st.i0_uu = i0(uu, uu, table);
  double b1 = st.grad_energy + lambda * st.l2_mass;
  st.nehari_defect = std::abs(b1 + mu * st.i0_uu) / b1;
  st.energy = 0.5 * b1 + 0.25 * mu * st.i0_uu;
  st.el_residual_norm = st.diagnostics.rel_residual_u;
  return st;
}

inline ScalarGroundState solve_scalar(double lambda, double mu, const GridSpec& spec,
                                      const SolverConfig& cfg) {
  KernelTable table(spec);
  return solve_scalar(lambda, mu, spec, cfg, table);
}

struct ScalarReport {
  std::vector<std::pair<double, double>> farfield;  // (r, defect)
  DecayFit decay;
  int monotonicity_violations = 0;
  double asymmetry = 0;
};

inline ScalarReport scalar_diagnostics(const ScalarGroundState& st, const KernelTable& table) {
  ScalarReport rep;
  double L = st.u.spec.half_width;
  Field uu(st.u.spec);
  for (std::size_t i = 0; i < uu.values.size(); ++i) uu.values[i] = st.u.values[i] * st.u.values[i];
  rep.farfield = farfield_check(uu, table, {0.5 * L, 0.7 * L, 0.8 * L});
  rep.decay = decay_fit(st.u, 0.3 * L, 0.6 * L);
  rep.monotonicity_violations = monotonicity_violations(st.u);
  rep.asymmetry = radial_asymmetry(st.u);
  return rep;
}

}  // namespace loghartree

#endif
