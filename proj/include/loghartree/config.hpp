#ifndef LOGHARTREE_CONFIG_HPP
#define LOGHARTREE_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "loghartree/io.hpp"
#include "loghartree/solver.hpp"

namespace loghartree {

struct RunConfig {
  int grid_n = 256;
  std::optional<double> box_l;  // empty = auto: 12 / sqrt(min(lambda1, lambda2))
  SystemParams params;
  SolverConfig solver;
  std::vector<double> sweep_betas;
  std::string output_dir = "out";

  double resolved_l() const {
    if (box_l) return *box_l;
    return 12.0 / std::sqrt(std::min(params.lambda1, params.lambda2));
  }
  GridSpec grid() const { return make_grid(resolved_l(), grid_n); }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw std::invalid_argument(std::string("config: ") + name + " must be > 0");
    };
    positive(params.lambda1, "params.lambda1");
    positive(params.lambda2, "params.lambda2");
    positive(params.mu1, "params.mu1");
    positive(params.mu2, "params.mu2");
    positive(params.beta, "params.beta");
    if (grid_n < 8 || grid_n % 2 != 0)
      throw std::invalid_argument("config: grid.N must be even and >= 8");
    if (box_l && !(*box_l > 0.0)) throw std::invalid_argument("config: grid.L must be > 0");
    positive(solver.tol_grad, "solver.tol_grad");
    positive(solver.tol_nehari, "solver.tol_nehari");
    if (!(solver.ls_shrink > 0.0 && solver.ls_shrink < 1.0))
      throw std::invalid_argument("config: solver.ls_shrink must lie in (0,1)");
    if (solver.max_iters <= 0)
      throw std::invalid_argument("config: solver.max_iters must be > 0");
    if (solver.multistart < 1)
      throw std::invalid_argument("config: solver.multistart must be >= 1");
    if (!std::is_sorted(sweep_betas.begin(), sweep_betas.end()))
      throw std::invalid_argument("config: sweep.betas must be sorted ascending");
  }
};

namespace detail {

inline GaussianInit parse_init(const io::ordered_json& j) {
  GaussianInit g;
  g.amplitude = j.value("amplitude", 1.0);
  if (j.contains("center")) {
    g.center_x = j["center"].at(0).get<double>();
    g.center_y = j["center"].at(1).get<double>();
  }
  if (j.contains("sigma") && j["sigma"].is_number()) g.sigma = j["sigma"].get<double>();
  return g;
}

}  // namespace detail

inline RunConfig parse_config(const io::ordered_json& j) {
  RunConfig cfg;
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    cfg.grid_n = g.value("N", 256);
    if (g.contains("L") && g["L"].is_number()) cfg.box_l = g["L"].get<double>();
  }
  if (j.contains("params")) {
    const auto& p = j["params"];
    cfg.params.lambda1 = p.value("lambda1", 1.0);
    cfg.params.lambda2 = p.value("lambda2", 1.0);
    cfg.params.mu1 = p.value("mu1", 1.0);
    cfg.params.mu2 = p.value("mu2", 1.0);
    cfg.params.beta = p.value("beta", 1.0);
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    cfg.solver.max_iters = s.value("max_iters", 20000);
    cfg.solver.tol_grad = s.value("tol_grad", 1e-8);
    cfg.solver.tol_nehari = s.value("tol_nehari", 1e-8);
    cfg.solver.ls_shrink = s.value("ls_shrink", 0.5);
    cfg.solver.ls_c1 = s.value("ls_c1", 1e-4);
    cfg.solver.seed = s.value("seed", static_cast<std::uint64_t>(42));
    cfg.solver.multistart = s.value("multistart", 1);
    cfg.solver.recenter_every = s.value("recenter_every", 10);
    if (s.contains("init")) {
      if (s["init"].contains("u")) cfg.solver.init_u = detail::parse_init(s["init"]["u"]);
      if (s["init"].contains("v")) cfg.solver.init_v = detail::parse_init(s["init"]["v"]);
    }
  }
  if (j.contains("sweep") && j["sweep"].contains("betas"))
    cfg.sweep_betas = j["sweep"]["betas"].get<std::vector<double>>();
  if (j.contains("output")) cfg.output_dir = j["output"].get<std::string>();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  return parse_config(io::read_json(path));
}

inline io::ordered_json config_to_json(const RunConfig& cfg) {
  io::ordered_json j;
  j["grid"]["N"] = cfg.grid_n;
  if (cfg.box_l)
    j["grid"]["L"] = *cfg.box_l;
  else
    j["grid"]["L"] = "auto";
  j["params"] = {{"lambda1", cfg.params.lambda1}, {"lambda2", cfg.params.lambda2},
                 {"mu1", cfg.params.mu1},         {"mu2", cfg.params.mu2},
                 {"beta", cfg.params.beta}};
  j["solver"] = {{"max_iters", cfg.solver.max_iters},
                 {"tol_grad", cfg.solver.tol_grad},
                 {"tol_nehari", cfg.solver.tol_nehari},
                 {"ls_shrink", cfg.solver.ls_shrink},
                 {"ls_c1", cfg.solver.ls_c1},
                 {"seed", cfg.solver.seed},
                 {"multistart", cfg.solver.multistart},
                 {"recenter_every", cfg.solver.recenter_every},
                 {"init",
                  {{"u",
                    {{"amplitude", cfg.solver.init_u.amplitude},
                     {"center", {cfg.solver.init_u.center_x, cfg.solver.init_u.center_y}},
                     {"sigma", cfg.solver.init_u.sigma}}},
                   {"v",
                    {{"amplitude", cfg.solver.init_v.amplitude},
                     {"center", {cfg.solver.init_v.center_x, cfg.solver.init_v.center_y}},
                     {"sigma", cfg.solver.init_v.sigma}}}}}};
  if (!cfg.sweep_betas.empty()) j["sweep"]["betas"] = cfg.sweep_betas;
  j["output"] = cfg.output_dir;
  return j;
}

}  // namespace loghartree

#endif
