#ifndef LOGHARTREE_STATE_IO_HPP
#define LOGHARTREE_STATE_IO_HPP

#include <filesystem>
#include <string>

#include "loghartree/analysis.hpp"
#include "loghartree/io.hpp"

namespace loghartree {

namespace detail {

inline io::ordered_json breakdown_to_json(const EnergyBreakdown& b) {
  return {{"grad_u", b.grad_u}, {"grad_v", b.grad_v}, {"mass_u", b.mass_u},
          {"mass_v", b.mass_v}, {"a0", b.a0},         {"a1", b.a1},
          {"a2", b.a2},         {"j", b.j},           {"n", b.n},
          {"h_norm_sq", b.h_norm_sq}, {"x_norm_sq", b.x_norm_sq}};
}

inline io::ordered_json diagnostics_to_json(const SolveDiagnostics& d) {
  return {{"iterations", d.iterations},
          {"rel_residual", d.rel_residual},
          {"rel_residual_u", d.rel_residual_u},
          {"rel_residual_v", d.rel_residual_v},
          {"nehari_defect", d.nehari_defect},
          {"converged", d.converged},
          {"stalled", d.stalled},
          {"semitrivial", d.semitrivial},
          {"fiber_multiple_roots", d.fiber_multiple_roots},
          {"hnorm_floor", d.hnorm_floor}};
}

}  // namespace detail

inline void save_state(const CoupledGroundState& st, const std::string& dir) {
  std::filesystem::create_directories(dir);
  io::write_field(st.pair.u, dir + "/u");
  io::write_field(st.pair.v, dir + "/v");
  io::ordered_json j;
  j["type"] = "coupled";
  j["params"] = {{"lambda1", st.params.lambda1}, {"lambda2", st.params.lambda2},
                 {"mu1", st.params.mu1},         {"mu2", st.params.mu2},
                 {"beta", st.params.beta}};
  j["c_level"] = st.c_level;
  j["breakdown"] = detail::breakdown_to_json(st.breakdown);
  j["diagnostics"] = detail::diagnostics_to_json(st.diagnostics);
  io::write_json(j, dir + "/state.json");
}

inline void save_state(const ScalarGroundState& st, const std::string& dir) {
  std::filesystem::create_directories(dir);
  io::write_field(st.u, dir + "/u");
  io::ordered_json j;
  j["type"] = "scalar";
  j["lambda"] = st.lambda;
  j["mu"] = st.mu;
  j["energy"] = st.energy;
  j["nehari_defect"] = st.nehari_defect;
  j["el_residual_norm"] = st.el_residual_norm;
  j["l2_mass"] = st.l2_mass;
  j["grad_energy"] = st.grad_energy;
  j["i0_uu"] = st.i0_uu;
  j["diagnostics"] = detail::diagnostics_to_json(st.diagnostics);
  io::write_json(j, dir + "/state.json");
}

struct LoadedState {
  bool coupled = false;
  FieldPair pair;      // v is a zero field for scalar states
  SystemParams params; // scalar states use lambda1/mu1 slots
};

inline LoadedState load_state(const std::string& dir) {
  io::ordered_json j = io::read_json(dir + "/state.json");
  LoadedState out;
  std::string type = j.value("type", "");
  if (type == "coupled") {
    out.coupled = true;
    out.pair = FieldPair(io::read_field(dir + "/u"), io::read_field(dir + "/v"));
    const auto& p = j.at("params");
    out.params.lambda1 = p.at("lambda1").get<double>();
    out.params.lambda2 = p.at("lambda2").get<double>();
    out.params.mu1 = p.at("mu1").get<double>();
    out.params.mu2 = p.at("mu2").get<double>();
    out.params.beta = p.at("beta").get<double>();
  } else if (type == "scalar") {
    Field u = io::read_field(dir + "/u");
    Field v(u.spec);
    out.pair = FieldPair(std::move(u), std::move(v));
    out.params.lambda1 = out.params.lambda2 = j.at("lambda").get<double>();
    out.params.mu1 = out.params.mu2 = j.at("mu").get<double>();
    out.params.beta = 1.0;
  } else {
    throw std::runtime_error("load_state: unknown state type in " + dir + "/state.json");
  }
  return out;
}

}  // namespace loghartree

#endif
