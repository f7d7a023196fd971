#ifndef LOGHARTREE_NEHARI_HPP
#define LOGHARTREE_NEHARI_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "loghartree/energy.hpp"

namespace loghartree {

// Coefficients of the fiber map along the scaling u -> t^2 u(tx):
//   g(t) = t^4 kin + t^2 mass + t^4 a0 - (t^4 ln t / 2pi) logmass.
struct FiberCoefficients {
  double kin = 0;      // |grad u|^2 + |grad v|^2
  double mass = 0;     // lambda1 |u|^2 + lambda2 |v|^2
  double a0 = 0;
  double logmass = 0;  // mu1 |u|2^4 + mu2 |v|2^4 + 2 beta |u|2^2 |v|2^2
};

inline FiberCoefficients fiber_coeffs(const FieldPair& p, const SystemParams& prm,
                                      const KernelTable& table) {
  FiberCoefficients c;
  c.kin = grad_norm_sq(p.u) + grad_norm_sq(p.v);
  double mu_mass = l2_norm_sq(p.u), mv_mass = l2_norm_sq(p.v);
  c.mass = prm.lambda1 * mu_mass + prm.lambda2 * mv_mass;
  c.a0 = assemble_potentials(p, prm, table).a0;
  c.logmass = prm.mu1 * mu_mass * mu_mass + prm.mu2 * mv_mass * mv_mass +
              2.0 * prm.beta * mu_mass * mv_mass;
  return c;
}

inline double fiber_value(const FiberCoefficients& c, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("fiber_value: t must be > 0");
  double t2 = t * t, t4 = t2 * t2;
  return t4 * c.kin + t2 * c.mass + t4 * c.a0 - (t4 * std::log(t) / kTwoPi) * c.logmass;
}

struct FiberRoot {
  double t0 = 1.0;
  bool multiple_roots = false;  // more than one sign change of g was seen
};

// Root of the fiber map by bracketed bisection on a log grid. When g changes
// sign more than once, the largest root is taken (g stays negative past it,
// matching the mountain-pass picture along the fiber).
inline FiberRoot fiber_root(const FiberCoefficients& c) {
  if (c.logmass <= 0.0) throw std::invalid_argument("fiber_root: zero pair");
  constexpr double kTMin = 1e-6, kTMax = 1e6;
  constexpr int kScan = 2401;
  double prev_t = kTMin, prev_g = fiber_value(c, kTMin);
  double lo = 0.0, hi = 0.0;
  int sign_changes = 0;
  for (int s = 1; s < kScan; ++s) {
    double t = kTMin * std::pow(kTMax / kTMin, static_cast<double>(s) / (kScan - 1));
    double g = fiber_value(c, t);
    if (prev_g > 0.0 && g <= 0.0) {
      lo = prev_t;
      hi = t;
      ++sign_changes;
    }
    prev_t = t;
    prev_g = g;
  }
  if (sign_changes == 0)
    throw std::runtime_error(
        "fiber_root: no sign change in [1e-6, 1e6]; coefficients kin=" +
        std::to_string(c.kin) + " mass=" + std::to_string(c.mass) + " a0=" +
        std::to_string(c.a0) + " logmass=" + std::to_string(c.logmass));
  while ((hi - lo) > 1e-12 * hi) {
    double mid = std::sqrt(lo * hi);
    if (fiber_value(c, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  FiberRoot out;
  out.t0 = 0.5 * (lo + hi);
  out.multiple_roots = sign_changes > 1;
  return out;
}

struct DilationProjection {
  FieldPair pair;
  double t0 = 1.0;
  bool multiple_roots = false;
};

inline DilationProjection dilation_project(const FieldPair& p, const SystemParams& prm,
                                           const KernelTable& table) {
  FiberRoot root = fiber_root(fiber_coeffs(p, prm, table));
  DilationProjection out;
  out.t0 = root.t0;
  out.multiple_roots = root.multiple_roots;
  out.pair = FieldPair(dilate(p.u, out.t0), dilate(p.v, out.t0));
  return out;
}

struct AmplitudeProjection {
  FieldPair pair;
  double s0 = 1.0;
};

// Exact on-grid projection using quartic homogeneity: N(s u, s v) = 0 at
// s^2 = -H^2/a0. Applicable only when a0 < 0; empty result otherwise.
inline std::optional<AmplitudeProjection> amplitude_project(const FieldPair& p,
                                                            const SystemParams& prm,
                                                            const KernelTable& table) {
  double a0 = assemble_potentials(p, prm, table).a0;
  if (!(a0 < 0.0)) return std::nullopt;
  double h2 = h_norm_sq(p, prm);
  AmplitudeProjection out;
  out.s0 = std::sqrt(-h2 / a0);
  Field su = p.u, sv = p.v;
  for (double& x : su.values) x *= out.s0;
  for (double& x : sv.values) x *= out.s0;
  out.pair = FieldPair(std::move(su), std::move(sv));
  return out;
}

namespace detail {

struct ScalarRefData {
  double grad = 0, mass = 0, i0_uu = 0;
};

inline ScalarRefData scalar_ref_data(const Field& u1, const KernelTable& table) {
  ScalarRefData d;
  d.grad = grad_norm_sq(u1);
  d.mass = l2_norm_sq(u1);
  Field uu(u1.spec);
  for (std::size_t i = 0; i < uu.values.size(); ++i) uu.values[i] = u1.values[i] * u1.values[i];
  d.i0_uu = i0(uu, uu, table);
  return d;
}

}  // namespace detail

// Closed-form root of F_rho(t) = N(t u1, t rho u1):
//   t_rho^2 = |(u1, rho u1)|_H^2 / ((mu1 + rho^4 mu2 + 2 rho^2 beta)(-I0(u1^2,u1^2))).
inline double t_rho(const Field& u1, double rho, const SystemParams& prm,
                    const KernelTable& table) {
  if (rho < 0.0) throw std::invalid_argument("t_rho: rho must be >= 0");
  auto d = detail::scalar_ref_data(u1, table);
  if (!(d.i0_uu < 0.0))
    throw std::runtime_error("t_rho: I0(u1^2,u1^2) must be negative at a scalar ground state");
  double h2 = (1.0 + rho * rho) * d.grad + (prm.lambda1 + rho * rho * prm.lambda2) * d.mass;
  double quart = prm.mu1 + std::pow(rho, 4) * prm.mu2 + 2.0 * rho * rho * prm.beta;
  return std::sqrt(h2 / (quart * (-d.i0_uu)));
}

// h(rho) = J(t_rho u1, t_rho rho u1) = H^4 / (4 (mu1 + rho^4 mu2 + 2 rho^2 beta)(-I0)).
inline double h_rho(const Field& u1, double rho, const SystemParams& prm,
                    const KernelTable& table) {
  if (rho < 0.0) throw std::invalid_argument("h_rho: rho must be >= 0");
  auto d = detail::scalar_ref_data(u1, table);
  if (!(d.i0_uu < 0.0))
    throw std::runtime_error("h_rho: I0(u1^2,u1^2) must be negative at a scalar ground state");
  double h2 = (1.0 + rho * rho) * d.grad + (prm.lambda1 + rho * rho * prm.lambda2) * d.mass;
  double quart = prm.mu1 + std::pow(rho, 4) * prm.mu2 + 2.0 * rho * rho * prm.beta;
  return h2 * h2 / (4.0 * quart * (-d.i0_uu));
}

struct HCurveRow {
  double rho = 0, t_rho = 0, h_rho = 0, j_direct = 0;
};

// The semitrivial fiber curve; j_direct re-evaluates J on the scaled pair as
// an independent route through the energy module.
inline std::vector<HCurveRow> h_curve(const Field& u1, const std::vector<double>& rho_grid,
                                      const SystemParams& prm, const KernelTable& table) {
  auto d = detail::scalar_ref_data(u1, table);
  if (!(d.i0_uu < 0.0))
    throw std::runtime_error("h_curve: I0(u1^2,u1^2) must be negative at a scalar ground state");
  std::vector<HCurveRow> rows;
  rows.reserve(rho_grid.size());
  for (double rho : rho_grid) {
    HCurveRow row;
    row.rho = rho;
    row.t_rho = t_rho(u1, rho, prm, table);
    row.h_rho = h_rho(u1, rho, prm, table);
    Field su = u1, sv = u1;
    for (double& x : su.values) x *= row.t_rho;
    for (double& x : sv.values) x *= row.t_rho * rho;
    row.j_direct = j_energy(FieldPair(std::move(su), std::move(sv)), prm, table).j;
    rows.push_back(row);
  }
  return rows;
}

struct BetaThresholds {
  double beta1 = 0, beta2 = 0;
  double b1_u1 = 0, b2_u1 = 0;  // |grad u1|^2 + lambda_i |u1|^2
  double b1_u2 = 0, b2_u2 = 0;  // |grad u2|^2 + lambda_i |u2|^2
};

// beta1 = mu1 (|grad u1|^2 + lambda2 |u1|^2) / (|grad u1|^2 + lambda1 |u1|^2),
// beta2 symmetric with u2 and lambda1 <-> lambda2.
inline BetaThresholds beta_thresholds(const Field& u1, const Field& u2,
                                      const SystemParams& prm) {
  BetaThresholds out;
  double g1 = grad_norm_sq(u1), m1 = l2_norm_sq(u1);
  double g2 = grad_norm_sq(u2), m2 = l2_norm_sq(u2);
  out.b1_u1 = g1 + prm.lambda1 * m1;
  out.b2_u1 = g1 + prm.lambda2 * m1;
  out.b1_u2 = g2 + prm.lambda1 * m2;
  out.b2_u2 = g2 + prm.lambda2 * m2;
  out.beta1 = prm.mu1 * out.b2_u1 / out.b1_u1;
  out.beta2 = prm.mu2 * out.b1_u2 / out.b2_u2;
  return out;
}

}  // namespace loghartree

#endif
