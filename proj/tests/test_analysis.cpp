#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <random>

#include "loghartree/analysis.hpp"
#include "loghartree/state_io.hpp"
#include "oracles.hpp"

using namespace loghartree;

namespace {

struct Fixture {
  GridSpec g = make_grid(12.0, 128);
  KernelTable table{g};
  SolverConfig cfg;
  ScalarGroundState u1;
  Fixture() {
    cfg.tol_grad = 1e-9;
    u1 = solve_scalar(1.0, 1.0, g, cfg, table);
  }
};

Fixture& fx() {
  static Fixture f;
  return f;
}

std::string temp_dir(const char* name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace

TEST_CASE("verify a converged scalar state: all checks pass, no ordering") {
  VerificationReport rep = verify(fx().u1, fx().table);
  CHECK(rep.pass);
  CHECK_FALSE(rep.has_v);
  CHECK_FALSE(rep.ordering.has_value());
  CHECK(rep.asymmetry_u <= 1e-3);
  CHECK(rep.monotonicity_violations_u == 0);
  CHECK(rep.decay_u.slope < 0.0);
  CHECK(rep.decay_u.r_squared >= 0.99);
  for (const auto& c : rep.checks) {
    CHECK(c.defect >= 0.0);
    CHECK(c.pass == (c.name == "decay_u" ? c.pass : c.defect <= c.tolerance || c.pass));
  }
}

TEST_CASE("verify is read-only") {
  ScalarGroundState copy = fx().u1;
  std::vector<double> before = copy.u.values;
  (void)verify(copy, fx().table);
  CHECK(copy.u.values == before);
}

TEST_CASE("radially symmetric input has zero asymmetry") {
  Field gauss = oracles::gaussian_density(fx().g, 0.7);
  CHECK(radial_asymmetry(gauss) <= 1e-13);
  Field skewed = Field::sampled(fx().g, [](double x, double y) {
    return std::exp(-(x * x + y * y)) * (1.0 + 0.2 * x);
  });
  CHECK(radial_asymmetry(skewed) > 1e-3);
}

TEST_CASE("coupled verification with ordering section") {
  SystemParams prm;
  prm.beta = 1.5;
  CoupledGroundState st = solve_coupled(prm, fx().g, fx().cfg, fx().table);
  ScalarGroundState u2 = fx().u1;  // symmetric parameters: same reference
  VerificationReport rep = verify(st, &fx().u1, &u2, fx().table);
  REQUIRE(rep.ordering.has_value());
  CHECK(rep.ordering->margin > 1e-4);
  CHECK(rep.pass);
  VerificationReport norefs = verify(st, nullptr, nullptr, fx().table);
  CHECK_FALSE(norefs.ordering.has_value());
}

TEST_CASE("emit_report round-trips numeric fields bitwise") {
  VerificationReport rep = verify(fx().u1, fx().table);
  std::string dir = temp_dir("lgh_report_test");
  std::string jpath = dir + "/report.json";
  emit_report(rep, jpath);
  io::ordered_json parsed = io::read_json(jpath);
  CHECK(parsed["nehari_defect"].get<double>() == rep.nehari_defect);
  CHECK(parsed["quarter_identity_defect"].get<double>() == rep.quarter_identity_defect);
  CHECK(parsed["asymmetry_u"].get<double>() == rep.asymmetry_u);
  CHECK(parsed["decay_slope_u"].get<double>() == rep.decay_u.slope);
  CHECK(parsed["el_residual_rel_u"].get<double>() == rep.el_residual_rel_u);
  CHECK(parsed["ordering"].is_string());
  CHECK(std::filesystem::exists(dir + "/report_farfield.csv"));
  CHECK(std::filesystem::exists(dir + "/report_profile_u.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("emit_report to a missing directory names the path") {
  VerificationReport rep;
  rep.farfield = {{1.0, 0.5}};
  try {
    emit_report(rep, "/nonexistent_dir_lgh/report.json");
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent_dir_lgh") != std::string::npos);
  }
}

TEST_CASE("tampered state fails verification") {
  std::string dir = temp_dir("lgh_tamper_test");
  save_state(fx().u1, dir);
  LoadedState ls = load_state(dir);
  // break the Nehari identity by inflating the amplitude
  for (double& v : ls.pair.u.values) v *= 1.5;
  VerificationReport rep = verify_pair(ls.pair, ls.params, fx().table, VerifyTolerances{},
                                       nullptr, nullptr, false);
  CHECK_FALSE(rep.pass);
  bool nehari_failed = false;
  for (const auto& c : rep.checks)
    if (c.name == "nehari") nehari_failed = !c.pass;
  CHECK(nehari_failed);
  std::filesystem::remove_all(dir);
}
