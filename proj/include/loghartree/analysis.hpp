#ifndef LOGHARTREE_ANALYSIS_HPP
#define LOGHARTREE_ANALYSIS_HPP

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loghartree/io.hpp"
#include "loghartree/scalar.hpp"

namespace loghartree {

struct VerifyTolerances {
  double el_residual = 1e-6;        // relative, per component
  double nehari = 1e-8;             // |N| / H^2
  double quarter_identity = 1e-8;   // relative
  double asymmetry = 1e-3;
  double monotonicity_bin = 1e-10;  // adjacent-bin increase threshold
  double decay_r2 = 0.99;
  double farfield = 1e-3;           // defect at r = 0.8 L
  double ordering_margin = 1e-4;    // relative
};

struct CheckResult {
  std::string name;
  double defect = 0;
  double tolerance = 0;
  bool pass = false;
};

struct OrderingSection {
  double c = 0;
  double j_u1_0 = 0;
  double j_0_u2 = 0;
  double margin = 0;  // (min(j_u1_0, j_0_u2) - c) / min(...)
};

struct VerificationReport {
  bool has_v = false;
  double el_residual_rel_u = 0, el_residual_rel_v = 0;
  double nehari_defect = 0;
  double quarter_identity_defect = 0;
  double asymmetry_u = 0, asymmetry_v = 0;
  int monotonicity_violations_u = 0, monotonicity_violations_v = 0;
  DecayFit decay_u, decay_v;
  std::vector<std::pair<double, double>> farfield;  // of the total density
  std::optional<OrderingSection> ordering;          // absent => "skipped"
  RadialProfile profile_u, profile_v;
  std::vector<CheckResult> checks;
  bool pass = false;
  VerifyTolerances tolerances;
};

namespace detail {

inline void add_check(VerificationReport& rep, const std::string& name, double defect,
                      double tol, bool pass_value) {
  rep.checks.push_back({name, defect, tol, pass_value});
}

}  // namespace detail

// Post-hoc verification of the structural claims on a computed pair. The
// inputs are read-only; every reported flag carries its defect and tolerance.
inline VerificationReport verify_pair(const FieldPair& pair, const SystemParams& prm,
                                      const KernelTable& table, const VerifyTolerances& tol,
                                      const double* j_u1_0 = nullptr,
                                      const double* j_0_u2 = nullptr, bool has_v = true) {
  VerificationReport rep;
  rep.tolerances = tol;
  rep.has_v = has_v;
  double L = pair.spec().half_width;

  PairPotentials pot = assemble_potentials(pair, prm, table);
  auto [ru, rv] = el_residual_from(pair, prm, pot);
  double mu_mass = l2_norm_sq(pair.u), mv_mass = l2_norm_sq(pair.v);
  double h2 = h_norm_sq(pair, prm);
  double j = 0.5 * h2 + 0.25 * pot.a0;
  double n = h2 + pot.a0;

  rep.el_residual_rel_u = mu_mass > 0 ? std::sqrt(l2_norm_sq(ru) / mu_mass) : 0;
  rep.el_residual_rel_v = mv_mass > 0 ? std::sqrt(l2_norm_sq(rv) / mv_mass) : 0;
  rep.nehari_defect = std::abs(n) / h2;
  rep.quarter_identity_defect = std::abs(j - 0.25 * h2) / std::abs(j);
  rep.asymmetry_u = radial_asymmetry(pair.u);
  rep.monotonicity_violations_u =
      monotonicity_violations(pair.u, 128, tol.monotonicity_bin);
  rep.decay_u = decay_fit(pair.u, 0.3 * L, 0.6 * L);
  rep.profile_u = radial_profile(pair.u, 128);
  if (has_v) {
    rep.asymmetry_v = radial_asymmetry(pair.v);
    rep.monotonicity_violations_v =
        monotonicity_violations(pair.v, 128, tol.monotonicity_bin);
    rep.decay_v = decay_fit(pair.v, 0.3 * L, 0.6 * L);
    rep.profile_v = radial_profile(pair.v, 128);
  }
  Field dens(pair.spec());
  for (std::size_t i = 0; i < dens.values.size(); ++i)
    dens.values[i] =
        pair.u.values[i] * pair.u.values[i] + pair.v.values[i] * pair.v.values[i];
  rep.farfield = farfield_check(dens, table, {0.5 * L, 0.7 * L, 0.8 * L});

  detail::add_check(rep, "el_residual_u", rep.el_residual_rel_u, tol.el_residual,
                    rep.el_residual_rel_u <= tol.el_residual);
  if (has_v)
    detail::add_check(rep, "el_residual_v", rep.el_residual_rel_v, tol.el_residual,
                      rep.el_residual_rel_v <= tol.el_residual);
  detail::add_check(rep, "nehari", rep.nehari_defect, tol.nehari,
                    rep.nehari_defect <= tol.nehari);
  detail::add_check(rep, "quarter_identity", rep.quarter_identity_defect,
                    tol.quarter_identity, rep.quarter_identity_defect <= tol.quarter_identity);
  detail::add_check(rep, "asymmetry_u", rep.asymmetry_u, tol.asymmetry,
                    rep.asymmetry_u <= tol.asymmetry);
  if (has_v)
    detail::add_check(rep, "asymmetry_v", rep.asymmetry_v, tol.asymmetry,
                      rep.asymmetry_v <= tol.asymmetry);
  detail::add_check(rep, "monotonicity_u", rep.monotonicity_violations_u, 0.0,
                    rep.monotonicity_violations_u == 0);
  if (has_v)
    detail::add_check(rep, "monotonicity_v", rep.monotonicity_violations_v, 0.0,
                      rep.monotonicity_violations_v == 0);
  detail::add_check(rep, "decay_u", -rep.decay_u.slope, 0.0,
                    rep.decay_u.slope < 0 && rep.decay_u.r_squared >= tol.decay_r2);
  if (has_v)
    detail::add_check(rep, "decay_v", -rep.decay_v.slope, 0.0,
                      rep.decay_v.slope < 0 && rep.decay_v.r_squared >= tol.decay_r2);
  double ff = rep.farfield.back().second;  // defect at 0.8 L
  detail::add_check(rep, "farfield", ff, tol.farfield, ff <= tol.farfield);
  if (j_u1_0 && j_0_u2) {
    OrderingSection ord;
    ord.c = j;
    ord.j_u1_0 = *j_u1_0;
    ord.j_0_u2 = *j_0_u2;
    double ref = std::min(ord.j_u1_0, ord.j_0_u2);
    ord.margin = (ref - j) / ref;
    rep.ordering = ord;
    detail::add_check(rep, "ordering", ord.margin, tol.ordering_margin,
                      ord.margin > tol.ordering_margin);
  }
  rep.pass = true;
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

inline VerificationReport verify(const CoupledGroundState& st, const ScalarGroundState* u1,
                                 const ScalarGroundState* u2, const KernelTable& table,
                                 const VerifyTolerances& tol = {}) {
  const double* j1 = nullptr;
  const double* j2 = nullptr;
  double e1 = 0, e2 = 0;
  if (u1 && u2) {
    e1 = u1->energy;
    e2 = u2->energy;
    j1 = &e1;
    j2 = &e2;
  }
  return verify_pair(st.pair, st.params, table, tol, j1, j2, /*has_v=*/true);
}

inline VerificationReport verify(const ScalarGroundState& st, const KernelTable& table,
                                 const VerifyTolerances& tol = {}) {
  SystemParams prm;
  prm.lambda1 = prm.lambda2 = st.lambda;
  prm.mu1 = prm.mu2 = st.mu;
  prm.beta = 1.0;
  FieldPair pair(st.u, Field(st.u.spec));
  return verify_pair(pair, prm, table, tol, nullptr, nullptr, /*has_v=*/false);
}

inline io::ordered_json report_to_json(const VerificationReport& rep) {
  io::ordered_json j;
  j["pass"] = rep.pass;
  j["el_residual_rel_u"] = rep.el_residual_rel_u;
  if (rep.has_v) j["el_residual_rel_v"] = rep.el_residual_rel_v;
  j["nehari_defect"] = rep.nehari_defect;
  j["quarter_identity_defect"] = rep.quarter_identity_defect;
  j["asymmetry_u"] = rep.asymmetry_u;
  if (rep.has_v) j["asymmetry_v"] = rep.asymmetry_v;
  j["monotonicity_violations_u"] = rep.monotonicity_violations_u;
  if (rep.has_v) j["monotonicity_violations_v"] = rep.monotonicity_violations_v;
  j["decay_slope_u"] = rep.decay_u.slope;
  j["decay_r2_u"] = rep.decay_u.r_squared;
  if (rep.has_v) {
    j["decay_slope_v"] = rep.decay_v.slope;
    j["decay_r2_v"] = rep.decay_v.r_squared;
  }
  io::ordered_json ff = io::ordered_json::array();
  for (auto& [r, d] : rep.farfield) ff.push_back({{"r", r}, {"defect", d}});
  j["farfield"] = ff;
  if (rep.ordering) {
    j["ordering"] = {{"c", rep.ordering->c},
                     {"j_u1_0", rep.ordering->j_u1_0},
                     {"j_0_u2", rep.ordering->j_0_u2},
                     {"margin", rep.ordering->margin}};
  } else {
    j["ordering"] = "skipped";
  }
  io::ordered_json checks = io::ordered_json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name},
                      {"defect", c.defect},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
  j["checks"] = checks;
  j["tolerances"] = {{"el_residual", rep.tolerances.el_residual},
                     {"nehari", rep.tolerances.nehari},
                     {"quarter_identity", rep.tolerances.quarter_identity},
                     {"asymmetry", rep.tolerances.asymmetry},
                     {"monotonicity_bin", rep.tolerances.monotonicity_bin},
                     {"decay_r2", rep.tolerances.decay_r2},
                     {"farfield", rep.tolerances.farfield},
                     {"ordering_margin", rep.tolerances.ordering_margin}};
  return j;
}

// JSON document plus CSV companions for the curves: <stem>_farfield.csv and
// <stem>_profile_{u,v}.csv next to the JSON file.
inline void emit_report(const VerificationReport& rep, const std::string& json_path) {
  io::write_json(report_to_json(rep), json_path);
  std::filesystem::path p(json_path);
  std::string stem = (p.parent_path() / p.stem()).string();
  std::vector<std::vector<double>> ff;
  for (auto& [r, d] : rep.farfield) ff.push_back({r, d});
  io::write_csv(stem + "_farfield.csv", {"r", "value"}, ff);
  std::vector<std::vector<double>> pu;
  for (std::size_t k = 0; k < rep.profile_u.r.size(); ++k)
    pu.push_back({rep.profile_u.r[k], rep.profile_u.mean[k]});
  io::write_csv(stem + "_profile_u.csv", {"r", "value"}, pu);
  if (rep.has_v) {
    std::vector<std::vector<double>> pv;
    for (std::size_t k = 0; k < rep.profile_v.r.size(); ++k)
      pv.push_back({rep.profile_v.r[k], rep.profile_v.mean[k]});
    io::write_csv(stem + "_profile_v.csv", {"r", "value"}, pv);
  }
}

}  // namespace loghartree

#endif
