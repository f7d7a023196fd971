#ifndef LOGHARTREE_ENERGY_HPP
#define LOGHARTREE_ENERGY_HPP

#include <cmath>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "loghartree/grid.hpp"
#include "loghartree/kernel.hpp"

namespace loghartree {

struct SystemParams {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;
  double beta = 1.0;

  void validate() const {
    if (!(lambda1 > 0 && lambda2 > 0 && mu1 > 0 && mu2 > 0 && beta > 0))
      throw std::invalid_argument("SystemParams: all five constants must be > 0");
  }
};

struct FieldPair {
  Field u;
  Field v;

  FieldPair() = default;
  FieldPair(Field uu, Field vv) : u(std::move(uu)), v(std::move(vv)) {
    require_same_spec(u, v, "FieldPair");
  }
  const GridSpec& spec() const { return u.spec; }
};

inline double h_norm_sq(const FieldPair& p, const SystemParams& prm) {
  return grad_norm_sq(p.u) + grad_norm_sq(p.v) + prm.lambda1 * l2_norm_sq(p.u) +
         prm.lambda2 * l2_norm_sq(p.v);
}

inline double x_norm_sq(const FieldPair& p, const SystemParams& prm) {
  return h_norm_sq(p, prm) + xlog_norm_sq(p.u) + xlog_norm_sq(p.v);
}

struct EnergyBreakdown {
  double grad_u = 0, grad_v = 0;
  double mass_u = 0, mass_v = 0;  // unweighted L2 masses ||u||_2^2, ||v||_2^2
  double a0 = 0, a1 = 0, a2 = 0;
  double j = 0, n = 0;
  double h_norm_sq = 0, x_norm_sq = 0;
};

// Everything the solver needs per iterate: the two potentials and the three
// nonlocal pairings, assembled with two convolutions.
struct PairPotentials {
  Field w_u, w_v;           // log potentials of u^2 and v^2
  double i_uu = 0, i_vv = 0, i_uv = 0;
  double a0 = 0;
};

inline PairPotentials assemble_potentials(const FieldPair& p, const SystemParams& prm,
                                          const KernelTable& table) {
  PairPotentials out;
  Field uu(p.spec()), vv(p.spec());
  for (std::size_t i = 0; i < uu.values.size(); ++i) {
    uu.values[i] = p.u.values[i] * p.u.values[i];
    vv.values[i] = p.v.values[i] * p.v.values[i];
  }
  out.w_u = log_potential(uu, table);
  out.w_v = log_potential(vv, table);
  out.i_uu = -inner_l2(out.w_u, uu);
  out.i_vv = -inner_l2(out.w_v, vv);
  out.i_uv = -inner_l2(out.w_u, vv);
  out.a0 = prm.mu1 * out.i_uu + prm.mu2 * out.i_vv + 2.0 * prm.beta * out.i_uv;
  return out;
}

// A_i(u,v) = mu1 I_i(u^2,u^2) + mu2 I_i(v^2,v^2) + 2 beta I_i(u^2,v^2).
inline std::tuple<double, double, double> a_functionals(const FieldPair& p,
                                                        const SystemParams& prm,
                                                        const KernelTable& table) {
  Field uu(p.spec()), vv(p.spec());
  for (std::size_t i = 0; i < uu.values.size(); ++i) {
    uu.values[i] = p.u.values[i] * p.u.values[i];
    vv.values[i] = p.v.values[i] * p.v.values[i];
  }
  double a0 = prm.mu1 * i0(uu, uu, table) + prm.mu2 * i0(vv, vv, table) +
              2.0 * prm.beta * i0(uu, vv, table);
  double a1v = prm.mu1 * i1(uu, uu, table) + prm.mu2 * i1(vv, vv, table) +
               2.0 * prm.beta * i1(uu, vv, table);
  double a2v = prm.mu1 * i2(uu, uu, table) + prm.mu2 * i2(vv, vv, table) +
               2.0 * prm.beta * i2(uu, vv, table);
  return {a0, a1v, a2v};
}

inline EnergyBreakdown j_energy(const FieldPair& p, const SystemParams& prm,
                                const KernelTable& table) {
  EnergyBreakdown b;
  b.grad_u = grad_norm_sq(p.u);
  b.grad_v = grad_norm_sq(p.v);
  b.mass_u = l2_norm_sq(p.u);
  b.mass_v = l2_norm_sq(p.v);
  std::tie(b.a0, b.a1, b.a2) = a_functionals(p, prm, table);
  b.h_norm_sq = b.grad_u + b.grad_v + prm.lambda1 * b.mass_u + prm.lambda2 * b.mass_v;
  b.x_norm_sq = b.h_norm_sq + xlog_norm_sq(p.u) + xlog_norm_sq(p.v);
  b.j = 0.5 * b.h_norm_sq + 0.25 * b.a0;
  b.n = b.h_norm_sq + b.a0;
  return b;
}

// Strong-form Euler-Lagrange residuals
//   r_u = -Lap u + lambda1 u - (mu1 w_u + beta w_v) u
//   r_v = -Lap v + lambda2 v - (mu2 w_v + beta w_u) v
// which are also the exact L2 gradients of the discrete J.
inline std::pair<Field, Field> el_residual_from(const FieldPair& p, const SystemParams& prm,
                                                const PairPotentials& pot) {
  Field ru = laplacian(p.u);
  Field rv = laplacian(p.v);
  for (std::size_t i = 0; i < ru.values.size(); ++i) {
    ru.values[i] = -ru.values[i] + prm.lambda1 * p.u.values[i] -
                   (prm.mu1 * pot.w_u.values[i] + prm.beta * pot.w_v.values[i]) * p.u.values[i];
    rv.values[i] = -rv.values[i] + prm.lambda2 * p.v.values[i] -
                   (prm.mu2 * pot.w_v.values[i] + prm.beta * pot.w_u.values[i]) * p.v.values[i];
  }
  return {std::move(ru), std::move(rv)};
}

inline std::pair<Field, Field> el_residual(const FieldPair& p, const SystemParams& prm,
                                           const KernelTable& table) {
  return el_residual_from(p, prm, assemble_potentials(p, prm, table));
}

// Both sides of the explicit A1 bound
//   A1(u,v) <= (1/pi)(mu1 |u|*^2 |u|2^2 + mu2 |v|*^2 |v|2^2
//               + beta |u|*^2 |v|2^2 + beta |v|*^2 |u|2^2).
inline std::pair<double, double> a1_bound_check(const FieldPair& p, const SystemParams& prm,
                                                const KernelTable& table) {
  Field uu(p.spec()), vv(p.spec());
  for (std::size_t i = 0; i < uu.values.size(); ++i) {
    uu.values[i] = p.u.values[i] * p.u.values[i];
    vv.values[i] = p.v.values[i] * p.v.values[i];
  }
  double lhs = prm.mu1 * i1(uu, uu, table) + prm.mu2 * i1(vv, vv, table) +
               2.0 * prm.beta * i1(uu, vv, table);
  double su = xlog_norm_sq(p.u), sv = xlog_norm_sq(p.v);
  double mu_mass = l2_norm_sq(p.u), mv_mass = l2_norm_sq(p.v);
  double rhs = (prm.mu1 * su * mu_mass + prm.mu2 * sv * mv_mass + prm.beta * su * mv_mass +
                prm.beta * sv * mu_mass) /
               M_PI;
  return {lhs, rhs};
}

}  // namespace loghartree

#endif
