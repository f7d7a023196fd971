#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "loghartree/config.hpp"
#include "loghartree/state_io.hpp"

using namespace loghartree;

namespace {

std::string temp_dir(const char* name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace

TEST_CASE("field files round-trip bitwise") {
  GridSpec g = make_grid(3.0, 16);
  Field f(g);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  for (double& v : f.values) v = normal(rng);
  std::string dir = temp_dir("lgh_io_test");
  io::write_field(f, dir + "/field");
  Field back = io::read_field(dir + "/field");
  CHECK(back.spec == g);
  CHECK(back.values == f.values);
  io::ordered_json meta = io::read_json(dir + "/field.json");
  CHECK(meta["dtype"] == "float64-le");
  CHECK(meta["layout"] == "row-major");
  std::filesystem::remove_all(dir);
}

TEST_CASE("field write into a missing directory fails with the path") {
  GridSpec g = make_grid(1.0, 8);
  try {
    io::write_field(Field(g), "/nonexistent_dir_lgh/f");
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("nonexistent_dir_lgh") != std::string::npos);
  }
}

TEST_CASE("config parsing, defaults and auto box") {
  io::ordered_json j = io::ordered_json::parse(R"({
    "grid": {"N": 128, "L": "auto"},
    "params": {"lambda1": 1.0, "lambda2": 4.0, "mu1": 1.0, "mu2": 1.0, "beta": 2.0},
    "solver": {"tol_grad": 1e-7, "init": {"u": {"amplitude": 1.2, "center": [0.5, 0.0]}}},
    "output": "runs/x"
  })");
  RunConfig cfg = parse_config(j);
  cfg.validate();
  CHECK(cfg.grid_n == 128);
  CHECK_FALSE(cfg.box_l.has_value());
  CHECK(cfg.resolved_l() == Catch::Approx(12.0));  // 12 / sqrt(min(1,4))
  CHECK(cfg.params.lambda2 == 4.0);
  CHECK(cfg.solver.tol_grad == 1e-7);
  CHECK(cfg.solver.init_u.amplitude == 1.2);
  CHECK(cfg.solver.init_u.center_x == 0.5);
  CHECK(cfg.output_dir == "runs/x");

  io::ordered_json j2 = j;
  j2["grid"]["L"] = 9.0;
  RunConfig cfg2 = parse_config(j2);
  CHECK(cfg2.resolved_l() == Catch::Approx(9.0));
}

TEST_CASE("config validation names the offending field") {
  io::ordered_json j;
  j["params"]["lambda1"] = -1.0;
  RunConfig cfg = parse_config(j);
  try {
    cfg.validate();
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("lambda1") != std::string::npos);
  }
  io::ordered_json jb;
  jb["solver"]["ls_shrink"] = 1.5;
  try {
    parse_config(jb).validate();
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("ls_shrink") != std::string::npos);
  }
}

TEST_CASE("config JSON round trip preserves values") {
  RunConfig cfg;
  cfg.grid_n = 64;
  cfg.params.beta = 2.5;
  cfg.solver.seed = 99;
  cfg.sweep_betas = {1.0, 2.0};
  RunConfig back = parse_config(config_to_json(cfg));
  CHECK(back.grid_n == 64);
  CHECK(back.params.beta == 2.5);
  CHECK(back.solver.seed == 99);
  CHECK(back.sweep_betas == cfg.sweep_betas);
  CHECK_FALSE(back.box_l.has_value());
}

TEST_CASE("scalar and coupled state round trips") {
  GridSpec g = make_grid(12.0, 64);
  KernelTable table(g);
  SolverConfig cfg;
  cfg.max_iters = 150;
  std::string dir = temp_dir("lgh_state_test");

  ScalarGroundState st = solve_scalar(1.0, 1.0, g, cfg, table);
  save_state(st, dir + "/scalar");
  LoadedState ls = load_state(dir + "/scalar");
  CHECK_FALSE(ls.coupled);
  CHECK(ls.pair.u.values == st.u.values);
  CHECK(ls.params.lambda1 == 1.0);

  SystemParams prm;
  prm.beta = 1.5;
  CoupledGroundState cst = solve_coupled(prm, g, cfg, table);
  save_state(cst, dir + "/coupled");
  LoadedState lc = load_state(dir + "/coupled");
  CHECK(lc.coupled);
  CHECK(lc.pair.u.values == cst.pair.u.values);
  CHECK(lc.pair.v.values == cst.pair.v.values);
  CHECK(lc.params.beta == 1.5);
  std::filesystem::remove_all(dir);
}
