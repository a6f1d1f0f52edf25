#ifndef UNIMECH_SERIALIZATION_HPP
#define UNIMECH_SERIALIZATION_HPP

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "unimech/examples.hpp"

namespace unimech {

using json = nlohmann::json;

inline json to_json_vec(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Vec vec_from_json(const json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline json to_json_grid(const Grid<double>& g) {
  json rows = json::array();
  for (int r = 0; r < g.rows; ++r) rows.push_back(g.row(r));
  return rows;
}

inline json point_json(const LieGroup& G, const UnifiedPoint& w) {
  return {{"q", to_json_grid(w.base.q)},
          {"g", to_json_vec(G.wrap_for_output(w.base.g))},
          {"xi", to_json_grid(w.base.xi)},
          {"p", to_json_grid(w.p)},
          {"alpha", to_json_grid(w.alpha)}};
}

inline json trajectory_json(const UnifiedSystem& sys, const Trajectory& traj) {
  const auto& s = sys.shape;
  json j = {{"problem", sys.name},
            {"group", sys.G().name()},
            {"shape", {{"m", s.m}, {"d", s.d}, {"k", s.k}}},
            {"times", traj.times}};
  json pts = json::array();
  for (const auto& w : traj.points) pts.push_back(point_json(sys.G(), w));
  j["points"] = pts;
  return j;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string invariants_csv(const InvariantLog& log) {
  bool defect = false;
  for (const auto& r : log.records) defect = defect || r.symplectic_defect.has_value();
  std::ostringstream os;
  os << "t,H,wc_residual" << (defect ? ",symplectic_defect" : "") << "\n";
  for (const auto& r : log.records) {
    os << fmt(r.t) << "," << fmt(r.H) << "," << fmt(r.wc_residual);
    if (defect) os << "," << (r.symplectic_defect ? fmt(*r.symplectic_defect) : "");
    os << "\n";
  }
  return os.str();
}

inline std::string controls_csv(const std::vector<double>& t, const std::vector<Vec>& u) {
  std::ostringstream os;
  os << "t";
  const int r = u.empty() ? 0 : static_cast<int>(u.front().size());
  for (int a = 0; a < r; ++a) os << ",u_" << (a + 1);
  os << "\n";
  for (size_t i = 0; i < u.size(); ++i) {
    os << fmt(t[i]);
    for (int a = 0; a < r; ++a) os << "," << fmt(u[i][a]);
    os << "\n";
  }
  return os.str();
}

inline json gnh_json(const UnifiedSystem& sys, const GnhReport& rep) {
  json levels = json::array();
  for (size_t i = 0; i < rep.levels.size(); ++i) {
    const auto& l = rep.levels[i];
    levels.push_back({{"level", i + 1},
                      {"rank", l.rank},
                      {"dim", l.dim},
                      {"n_new_constraints", l.n_new_constraints},
                      {"labels", l.labels}});
  }
  return {{"problem", sys.name}, {"status", to_string(rep.status)}, {"levels", levels}};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  f << text;
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + path);
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// Problem files:
// { "problem": <example name>, "vehicle": {m_mass, J1, J2, p_offset, rho1, rho2},
//   "integrator": {step, n_steps}, "boundary": {q0, qd0, xi0, g0, qT, qdT, xiT, gT},
//   "horizon": T, "guess": [...] }
// OCP files may name the base system as {"base_lagrangian": {"name": ..., "params": {...}}}.
struct ProblemSpec {
  std::string name;
  VehicleParams vehicle;
  std::optional<double> step;
  std::optional<int> n_steps;
  std::optional<double> horizon;
  std::optional<json> boundary;
  std::optional<Vec> guess;
};

inline VehicleParams vehicle_from_json(const json& j, VehicleParams v = {}) {
  v.m_mass = j.value("m_mass", v.m_mass);
  v.J1 = j.value("J1", v.J1);
  v.J2 = j.value("J2", v.J2);
  v.p_offset = j.value("p_offset", v.p_offset);
  v.rho1 = j.value("rho1", v.rho1);
  v.rho2 = j.value("rho2", v.rho2);
  return v;
}

inline ProblemSpec parse_problem(const json& j) {
  ProblemSpec p;
  try {
    if (j.contains("problem")) p.name = j.at("problem").get<std::string>();
    if (j.contains("base_lagrangian")) {
      const auto& b = j.at("base_lagrangian");
      p.name = b.at("name").get<std::string>();
      if (b.contains("params")) p.vehicle = vehicle_from_json(b.at("params"));
    }
    if (j.contains("vehicle")) p.vehicle = vehicle_from_json(j.at("vehicle"), p.vehicle);
    if (j.contains("integrator")) {
      const auto& i = j.at("integrator");
      if (i.contains("step")) p.step = i.at("step").get<double>();
      if (i.contains("n_steps")) p.n_steps = i.at("n_steps").get<int>();
    }
    if (j.contains("horizon")) p.horizon = j.at("horizon").get<double>();
    if (j.contains("boundary")) p.boundary = j.at("boundary");
    if (j.contains("guess")) p.guess = vec_from_json(j.at("guess"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed problem file: ") + e.what());
  }
  if (!is_example(p.name)) throw Error(ErrorCode::ConfigError, "unknown problem: " + p.name);
  return p;
}

inline ProblemSpec load_problem_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::ConfigError, "problem file not found: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, "cannot parse " + path + ": " + e.what());
  }
  return parse_problem(j);
}

// Example with the file's overrides applied.
inline Example resolve_example(const ProblemSpec& p) {
  Example ex = make_example(p.name, p.vehicle);
  if (p.step) ex.integrator.step = *p.step;
  if (p.n_steps) ex.integrator.n_steps = *p.n_steps;
  if (p.horizon || p.boundary || p.guess) {
    if (!ex.boundary) throw Error(ErrorCode::ConfigError, "problem " + p.name + " has no optimal control form");
    auto& bc = ex.boundary->bc;
    if (p.boundary) {
      const auto& b = *p.boundary;
      auto read = [&](const char* key, Vec& dst) {
        if (b.contains(key)) dst = vec_from_json(b.at(key));
      };
      read("q0", bc.q0);
      read("qd0", bc.qd0);
      read("xi0", bc.xi0);
      read("g0", bc.g0);
      read("qT", bc.qT);
      read("qdT", bc.qdT);
      read("xiT", bc.xiT);
      read("gT", bc.gT);
    }
    if (p.horizon) bc.T = *p.horizon;
    if (p.guess) ex.boundary->guess = *p.guess;
    if (!(bc.T > 0.0)) throw Error(ErrorCode::ConfigError, "horizon must be positive");
    const auto& s = ex.system.shape;
    if (bc.q0.size() != s.m || bc.qd0.size() != s.m || bc.qT.size() != s.m || bc.qdT.size() != s.m ||
        bc.xi0.size() != s.d || bc.xiT.size() != s.d || bc.g0.size() != s.d || bc.gT.size() != s.d)
      throw Error(ErrorCode::ConfigError, "boundary data has the wrong dimensions");
    if (ex.boundary->guess.size() != 2 * (s.m + s.d))
      throw Error(ErrorCode::ConfigError, "guess must have 2(m + d) entries");
  }
  return ex;
}

}  // namespace unimech

#endif  // UNIMECH_SERIALIZATION_HPP
