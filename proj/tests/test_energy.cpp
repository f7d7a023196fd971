#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "loghartree/energy.hpp"
#include "oracles.hpp"

using namespace loghartree;

namespace {

FieldPair random_smooth_pair(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.3, 1.2);
  double a1 = unif(rng), a2 = unif(rng);
  double c1 = unif(rng) - 0.75, c2 = unif(rng) - 0.75;
  Field u = Field::sampled(g, [&](double x, double y) {
    return a1 * std::exp(-0.5 * ((x - c1) * (x - c1) + y * y));
  });
  Field v = Field::sampled(g, [&](double x, double y) {
    return a2 * std::exp(-0.4 * (x * x + (y - c2) * (y - c2)));
  });
  return FieldPair(std::move(u), std::move(v));
}

}  // namespace

TEST_CASE("SystemParams validation") {
  SystemParams ok;
  CHECK_NOTHROW(ok.validate());
  SystemParams bad = ok;
  bad.beta = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.lambda2 = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("zero pair gives zero functionals") {
  GridSpec g = make_grid(4.0, 32);
  KernelTable table(g);
  SystemParams prm;
  FieldPair zero{Field(g), Field(g)};
  auto [a0, a1, a2] = a_functionals(zero, prm, table);
  CHECK(a0 == 0.0);
  CHECK(a1 == 0.0);
  CHECK(a2 == 0.0);
  EnergyBreakdown b = j_energy(zero, prm, table);
  CHECK(b.j == 0.0);
  CHECK(b.n == 0.0);
  auto [ru, rv] = el_residual(zero, prm, table);
  for (double x : ru.values) CHECK(x == 0.0);
  for (double x : rv.values) CHECK(x == 0.0);
  auto [lhs, rhs] = a1_bound_check(zero, prm, table);
  CHECK(lhs == 0.0);
  CHECK(rhs == 0.0);
}

TEST_CASE("breakdown identities on random smooth pairs") {
  GridSpec g = make_grid(8.0, 96);
  KernelTable table(g);
  SystemParams prm;
  prm.lambda2 = 2.0;
  prm.mu2 = 0.7;
  prm.beta = 1.4;
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 3; ++trial) {
    FieldPair p = random_smooth_pair(g, rng);
    EnergyBreakdown b = j_energy(p, prm, table);
    CHECK(b.a0 == Catch::Approx(b.a1 - b.a2).epsilon(1e-10));
    CHECK(b.j == Catch::Approx(0.5 * b.h_norm_sq + 0.25 * b.a0).epsilon(1e-12));
    CHECK(b.n == Catch::Approx(b.h_norm_sq + b.a0).epsilon(1e-12));
    CHECK(b.j - 0.25 * b.n == Catch::Approx(0.25 * b.h_norm_sq).epsilon(1e-12));
    CHECK(b.x_norm_sq >= b.h_norm_sq);
    CHECK(b.h_norm_sq == Catch::Approx(h_norm_sq(p, prm)).epsilon(1e-13));
    CHECK(b.x_norm_sq == Catch::Approx(x_norm_sq(p, prm)).epsilon(1e-13));
  }
}

TEST_CASE("quartic amplitude scaling of the A functionals") {
  GridSpec g = make_grid(6.0, 64);
  KernelTable table(g);
  SystemParams prm;
  prm.beta = 0.8;
  std::mt19937_64 rng(1);
  FieldPair p = random_smooth_pair(g, rng);
  FieldPair sp = p;
  for (double& x : sp.u.values) x *= 2.0;
  for (double& x : sp.v.values) x *= 2.0;
  auto [a0, a1v, a2v] = a_functionals(p, prm, table);
  auto [sa0, sa1, sa2] = a_functionals(sp, prm, table);
  CHECK(sa0 == Catch::Approx(16.0 * a0).epsilon(1e-12));
  CHECK(sa1 == Catch::Approx(16.0 * a1v).epsilon(1e-12));
  CHECK(sa2 == Catch::Approx(16.0 * a2v).epsilon(1e-12));
}

TEST_CASE("A0 is invariant under reflection through the origin") {
  GridSpec g = make_grid(6.0, 64);
  KernelTable table(g);
  SystemParams prm;
  std::mt19937_64 rng(9);
  FieldPair p = random_smooth_pair(g, rng);
  int n = g.points_per_side;
  FieldPair r = p;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      r.u.at(i, j) = p.u.at(n - 1 - i, n - 1 - j);
      r.v.at(i, j) = p.v.at(n - 1 - i, n - 1 - j);
    }
  auto [a0p, a1p, a2p] = a_functionals(p, prm, table);
  auto [a0r, a1r, a2r] = a_functionals(r, prm, table);
  CHECK(a0r == Catch::Approx(a0p).epsilon(1e-12));
  CHECK(a1r == Catch::Approx(a1p).epsilon(1e-12));
  CHECK(a2r == Catch::Approx(a2p).epsilon(1e-12));
}

TEST_CASE("el_residual matches central differences of J") {
  GridSpec g = make_grid(8.0, 64);
  KernelTable table(g);
  SystemParams prm;
  prm.lambda2 = 2.0;
  prm.beta = 1.5;
  std::mt19937_64 rng(3);
  FieldPair p = random_smooth_pair(g, rng);
  auto [ru, rv] = el_residual(p, prm, table);
  std::normal_distribution<double> normal(0.0, 1.0);
  double eps = 1e-4;
  for (int dir = 0; dir < 10; ++dir) {
    Field qu(g), qv(g);
    for (int i = 0; i < g.points_per_side; ++i)
      for (int j = 0; j < g.points_per_side; ++j) {
        double x = g.node(i), y = g.node(j);
        double damp = std::exp(-0.25 * (x * x + y * y));
        qu.at(i, j) = normal(rng) * damp;
        qv.at(i, j) = normal(rng) * damp;
      }
    auto j_at = [&](double sgn) {
      FieldPair q = p;
      for (std::size_t s = 0; s < q.u.values.size(); ++s) {
        q.u.values[s] += sgn * eps * qu.values[s];
        q.v.values[s] += sgn * eps * qv.values[s];
      }
      return j_energy(q, prm, table).j;
    };
    double fd = (j_at(1.0) - j_at(-1.0)) / (2.0 * eps);
    double pred = inner_l2(ru, qu) + inner_l2(rv, qv);
    CHECK(pred == Catch::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("residual of a semitrivial pair has zero second component") {
  GridSpec g = make_grid(6.0, 64);
  KernelTable table(g);
  SystemParams prm;
  FieldPair p(oracles::gaussian_density(g, 0.5), Field(g));
  auto [ru, rv] = el_residual(p, prm, table);
  for (double x : rv.values) CHECK(x == 0.0);
  CHECK(l2_norm_sq(ru) > 0.0);
}

TEST_CASE("A1 bound holds on random nonnegative pairs and is strict off-center") {
  GridSpec g = make_grid(6.0, 48);
  KernelTable table(g);
  SystemParams prm;
  prm.mu2 = 2.0;
  prm.beta = 0.6;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Field u(g), v(g);
    for (double& x : u.values) x = unif(rng);
    for (double& x : v.values) x = unif(rng);
    auto [lhs, rhs] = a1_bound_check(FieldPair(std::move(u), std::move(v)), prm, table);
    CHECK(lhs <= rhs);
  }
  FieldPair far_pair(oracles::gaussian_density(g, 2.0, 3.0, 3.0),
                     oracles::gaussian_density(g, 2.0, -3.0, 2.0));
  auto [lhs, rhs] = a1_bound_check(far_pair, prm, table);
  CHECK(lhs < rhs);
  CHECK(lhs < 0.5 * rhs);
}
