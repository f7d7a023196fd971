#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "loghartree/kernel.hpp"
#include "oracles.hpp"

using namespace loghartree;
using oracles::kPi;

namespace {

Field random_density(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Field f(g);
  for (double& v : f.values) v = unif(rng);
  return f;
}

}  // namespace

TEST_CASE("kernel table entries") {
  GridSpec g = make_grid(4.0, 8);  // h = 1
  KernelTable table(g);
  CHECK(g.spacing() == Catch::Approx(1.0));
  CHECK(table.k_point(1, 0) == Catch::Approx(0.0).margin(1e-16));  // ln(1) = 0
  CHECK(table.k_point(0, -1) == Catch::Approx(0.0).margin(1e-16));
  CHECK(table.k_point(3, 4) == Catch::Approx(std::log(5.0) / kTwoPi).epsilon(1e-14));
  // symmetry under z -> -z
  CHECK(table.k_point(2, -3) == table.k_point(-2, 3));
  CHECK(table.k_effective(1, -2) == table.k_effective(-1, 2));
}

TEST_CASE("zero-displacement entry matches brute quadrature of the cell average") {
  GridSpec g = make_grid(0.8, 16);  // h = 0.1
  KernelTable table(g);
  double brute = oracles::cell_average_log_quadrature(0.1) / kTwoPi;
  CHECK(table.k_point(0, 0) == Catch::Approx(brute).margin(1e-10));
}

TEST_CASE("split identity holds entrywise") {
  GridSpec g = make_grid(3.0, 12);
  KernelTable table(g);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(-11, 11);
  for (int trial = 0; trial < 50; ++trial) {
    int dx = pick(rng), dy = pick(rng);
    if (dx == 0 && dy == 0) continue;
    double k = table.k_point(dx, dy);
    double split = table.k1_point(dx, dy) - table.k2_point(dx, dy);
    CHECK(split == Catch::Approx(k).margin(1e-15));
    CHECK(table.k1_point(dx, dy) >= 0.0);
    CHECK(table.k2_point(dx, dy) >= 0.0);
  }
  // zero entry consistent as well, and k2 decays with distance
  CHECK(table.k1_point(0, 0) - table.k2_point(0, 0) == Catch::Approx(table.k_point(0, 0)).margin(1e-15));
  CHECK(table.k2_point(11, 11) < table.k2_point(1, 1));
}

TEST_CASE("log_potential of zero density vanishes") {
  GridSpec g = make_grid(2.0, 16);
  KernelTable table(g);
  Field w = log_potential(Field(g), table);
  for (double v : w.values) CHECK(v == 0.0);
}

TEST_CASE("FFT path matches the direct O(N^4) oracle") {
  std::mt19937_64 rng(11);
  for (int n : {8, 12, 16}) {
    GridSpec g = make_grid(1.5, n);
    KernelTable table(g);
    for (int trial = 0; trial < 5; ++trial) {
      Field f = random_density(g, rng);
      Field h = random_density(g, rng);
      double fast = i0(f, h, table);
      double slow = direct_i0_oracle(f, h, g);
      CHECK(fast == Catch::Approx(slow).epsilon(1e-12));
    }
  }
}

TEST_CASE("direct oracle: single-cell indicator and exact symmetry") {
  GridSpec g = make_grid(1.0, 8);
  KernelTable table(g);
  Field f(g);
  f.at(3, 4) = 2.0;
  double h = g.spacing();
  double expect = h * h * h * h * table.k_effective(0, 0) * 4.0;
  CHECK(direct_i0_oracle(f, f, g) == Catch::Approx(expect).epsilon(1e-14));

  std::mt19937_64 rng(5);
  Field a = random_density(g, rng), b = random_density(g, rng);
  CHECK(direct_i0_oracle(a, b, g) == direct_i0_oracle(b, a, g));  // bitwise

  GridSpec big = make_grid(1.0, 34);
  CHECK_THROWS_AS(direct_i0_oracle(Field(big), Field(big), big), std::invalid_argument);
}

TEST_CASE("i0 symmetry and bilinearity") {
  GridSpec g = make_grid(2.0, 24);
  KernelTable table(g);
  std::mt19937_64 rng(17);
  Field f = random_density(g, rng), h = random_density(g, rng), w = random_density(g, rng);
  CHECK(i0(f, h, table) == Catch::Approx(i0(h, f, table)).epsilon(1e-12));
  Field combo(g);
  for (std::size_t i = 0; i < combo.values.size(); ++i)
    combo.values[i] = 1.7 * f.values[i] - 0.4 * h.values[i];
  CHECK(i0(combo, w, table) ==
        Catch::Approx(1.7 * i0(f, w, table) - 0.4 * i0(h, w, table)).epsilon(1e-12));
}

TEST_CASE("split bilinear forms: i0 = i1 - i2, nonnegativity") {
  GridSpec g = make_grid(2.0, 24);
  KernelTable table(g);
  std::mt19937_64 rng(23);
  Field f = random_density(g, rng), h = random_density(g, rng);
  double v0 = i0(f, h, table), v1 = i1(f, h, table), v2 = i2(f, h, table);
  CHECK(v0 == Catch::Approx(v1 - v2).epsilon(1e-10));
  CHECK(v1 >= 0.0);
  CHECK(v2 >= 0.0);
  CHECK(i1(f, f, table) >= 0.0);
  CHECK(i2(f, f, table) >= 0.0);
}

TEST_CASE("i0 against the Gaussian closed form") {
  GridSpec g = make_grid(12.0, 256);
  KernelTable table(g);
  struct Case {
    double a, b, px, py, qx, qy;
  };
  for (const Case& c : {Case{1.0, 1.0, 0, 0, 0, 0}, Case{1.0, 0.7, 0, 0, 0, 0},
                        Case{0.5, 2.0, 0.4, 0.2, -0.3, 0.1}}) {
    Field f = oracles::gaussian_density(g, c.a, c.px, c.py);
    Field h = oracles::gaussian_density(g, c.b, c.qx, c.qy);
    double s = std::hypot(c.px - c.qx, c.py - c.qy);
    double exact = oracles::i0_gauss_exact(c.a, c.b, s);
    CHECK(i0(f, h, table) == Catch::Approx(exact).margin(1e-9 * std::abs(exact) + 1e-11));
  }
}

TEST_CASE("log potential obeys the far-field law for a Gaussian density") {
  GridSpec g = make_grid(12.0, 256);
  KernelTable table(g);
  Field f = oracles::gaussian_density(g, 1.0);
  auto checks = farfield_check(f, table, {0.5 * 12.0, 0.7 * 12.0});
  CHECK(checks[0].second < 1e-3);
  CHECK(checks[1].second < 1e-3);
  CHECK(checks[1].second <= checks[0].second);  // defect decreasing in r

  // point-like density: exact log potential of a point mass away from the cell
  Field pt(g);
  pt.at(128, 128) = 3.0;
  auto ptchk = farfield_check(pt, table, {6.0});
  CHECK(ptchk[0].second < 1e-4);

  CHECK_THROWS_AS(farfield_check(f, table, {13.0}), std::invalid_argument);
}

TEST_CASE("pointwise potential matches the closed form") {
  GridSpec g = make_grid(12.0, 256);
  KernelTable table(g);
  Field f = oracles::gaussian_density(g, 1.0);
  Field w = log_potential(f, table);
  for (int i : {30, 90, 128, 200}) {
    double x = g.node(i), y = g.node(i / 2);
    double r = std::hypot(x, y);
    double exact = -oracles::log_gauss_potential(1.0, r);
    CHECK(w.at(i, i / 2) == Catch::Approx(exact).margin(1e-9));
  }
}

TEST_CASE("discrete Poisson consistency") {
  GridSpec g = make_grid(12.0, 256);
  KernelTable table(g);
  Field f = oracles::gaussian_density(g, 1.0);
  CHECK(table.poisson_defect(f) <= 1e-3);
  Field f2 = Field::sampled(g, [](double x, double y) {
    double r2 = x * x + y * y;
    return (1.0 + 0.2 * r2) * std::exp(-0.8 * r2);
  });
  CHECK(table.poisson_defect(f2) <= 1e-3);
}
