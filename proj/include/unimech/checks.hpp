#ifndef UNIMECH_CHECKS_HPP
#define UNIMECH_CHECKS_HPP

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "unimech/examples.hpp"

namespace unimech {

struct CheckOptions {
  unsigned seed = 12345;
  std::optional<double> rho1, rho2;
  int halvings = 3;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace checks {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline std::string ratios_text(const std::vector<double>& r) {
  std::string s = "[";
  for (size_t i = 0; i < r.size(); ++i) s += (i ? ", " : "") + sci(r[i]);
  return s + "]";
}

inline std::vector<double> ratios(const std::vector<double>& v) {
  std::vector<double> r;
  for (size_t i = 1; i < v.size(); ++i) r.push_back(v[i - 1] / v[i]);
  return r;
}

inline bool all_within(const std::vector<double>& r, double lo, double hi) {
  for (double x : r)
    if (!(x >= lo && x <= hi)) return false;
  return !r.empty();
}

inline Vec random_vec(std::mt19937_64& rng, int n, double a) {
  std::uniform_real_distribution<double> U(-a, a);
  Vec v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

inline HigherOrderState random_vehicle_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  const double g = ang(rng);
  Vec r = random_vec(rng, 8, 1.0);
  return vehicle_state(g, r[0], r[1], r.segment(2, 3), r.segment(5, 3), random_vec(rng, 3, 1.0));
}

}  // namespace checks

// det of the bordered vehicle matrix equals 4 rho1 rho2 at J1 = J2 = m = p = 1.
inline CheckResult check_det_a(const CheckOptions& o = {}) {
  CheckResult r{1, "det-A"};
  std::mt19937_64 rng(o.seed);
  std::vector<std::pair<double, double>> pairs = {{1.0, 1.0}, {3.0, 0.5}, {0.2, 7.0}, {2.5, 2.5}, {10.0, 0.1}};
  if (o.rho1 || o.rho2) pairs = {{o.rho1.value_or(1.0), o.rho2.value_or(1.0)}};
  double worst = 0.0, last_det = 0.0;
  for (auto [r1, r2] : pairs) {
    VehicleParams P;
    P.rho1 = r1;
    P.rho2 = r2;
    for (int i = 0; i < 50; ++i) {
      UnifiedPoint w(BundleShape{1, 3, 2});
      w.base = checks::random_vehicle_state(rng);
      w.p.data = {0.1, -0.2};
      last_det = vehicle_regularity_matrix(P, w).det;
      worst = std::max(worst, std::abs(last_det - 4.0 * r1 * r2) / (4.0 * r1 * r2));
    }
  }
  r.passed = worst <= 1e-9;
  r.detail = "max rel err " + checks::sci(worst);
  if (pairs.size() == 1) r.detail += ", det = " + checks::sci(last_det) + " (expected " + checks::sci(4.0 * pairs[0].first * pairs[0].second) + ")";
  return r;
}

// Reduced constraints and cost against the reference vehicle formulas.
inline CheckResult check_constraint_reproduction(const CheckOptions& o = {}) {
  CheckResult r{2, "constraints"};
  std::mt19937_64 rng(o.seed + 1);
  VehicleParams P;
  ReducedOcp ocp = vehicle_ocp(P);
  double e1 = 0.0, e2 = 0.0, e3 = 0.0;
  for (int i = 0; i < 100; ++i) {
    HigherOrderState s = checks::random_vehicle_state(rng);
    e1 = std::max(e1, std::abs(evaluate(ocp.Phis[0], s) - vehicle_reference::phi1(P, s)));
    e2 = std::max(e2, std::abs(evaluate(ocp.Phis[1], s) - vehicle_reference::phi2(P, s)));
    e3 = std::max(e3, std::abs(evaluate(ocp.Ltilde, s) - vehicle_reference::ltilde(P, s)));
  }
  r.passed = std::max({e1, e2, e3}) <= 1e-10;
  r.detail = "max err Phi1 " + checks::sci(e1) + ", Phi2 " + checks::sci(e2) + ", Ltilde " + checks::sci(e3);
  return r;
}

// Rigid body integrated by the library against an independent Euler solver.
inline CheckResult check_ep_oracle(const CheckOptions& = {}) {
  CheckResult r{3, "ep-oracle"};
  const Eigen::Vector3d I(1.0, 2.0, 3.0), xi0(1.0, 0.1, 0.5);
  UnifiedSystem sys = rigid_body_system(I);
  IntegratorConfig ic;
  ic.step = 1e-3;
  ic.n_steps = 5000;
  auto [traj, log] = integrate(sys, rigid_body_point(I, xi0), ic);
  (void)log;
  auto ref = rigid_body_oracle(I, xi0, 5.0, 1e-3);
  double err = 0.0;
  for (size_t i = 0; i < ref.size() && i < traj.size(); ++i)
    err = std::max(err, (traj.points[i].base.xi.row_vec(0) - Vec(ref[i])).lpNorm<Eigen::Infinity>());
  r.passed = err <= 1e-6 && ref.size() == traj.size();
  r.detail = "max coordinate error " + checks::sci(err);
  return r;
}

inline std::vector<double> el_sequence(const Example& ex, double h0, double T, int halvings) {
  std::vector<double> v;
  for (int j = 0; j <= halvings; ++j) {
    IntegratorConfig ic;
    ic.step = h0 / (1 << j);
    ic.n_steps = static_cast<int>(std::llround(T / ic.step));
    ic.projection_tol = 1e-12;
    auto [traj, log] = integrate(ex.system, ex.initial, ic);
    (void)log;
    v.push_back(el_residual(ex.system, traj).max_norm());
  }
  return v;
}

inline CheckResult check_el_order(const CheckOptions& o = {}) {
  CheckResult r{4, "el-order"};
  r.passed = true;
  for (const char* name : {"vehicle-se2", "rigid-body"}) {
    auto q = checks::ratios(el_sequence(make_example(name), 0.02, 0.5, o.halvings));
    r.passed = r.passed && checks::all_within(q, 3.5, 4.5);
    r.detail += std::string(r.detail.empty() ? "" : "; ") + name + " ratios " + checks::ratios_text(q);
  }
  return r;
}

inline std::vector<double> drift_sequence(const Example& ex, double h0, double T, int halvings) {
  std::vector<double> v;
  for (int j = 0; j <= halvings; ++j) {
    IntegratorConfig ic;
    ic.step = h0 / (1 << j);
    ic.n_steps = static_cast<int>(std::llround(T / ic.step));
    ic.projection_tol = 1e-13;
    v.push_back(integrate(ex.system, ex.initial, ic).second.max_H_drift());
  }
  return v;
}

inline CheckResult check_h_order(const CheckOptions& o = {}) {
  CheckResult r{5, "h-order"};
  r.passed = true;
  for (const char* name : {"quartic-oscillator", "so3-spline"}) {
    auto q = checks::ratios(drift_sequence(make_example(name), 0.05, 2.0, o.halvings));
    r.passed = r.passed && checks::all_within(q, 12.0, 20.0);
    r.detail += std::string(r.detail.empty() ? "" : "; ") + name + " ratios " + checks::ratios_text(q);
  }
  return r;
}

inline std::vector<Vec> random_directions(std::mt19937_64& rng, int n, int count) {
  std::normal_distribution<double> N;
  std::vector<Vec> out;
  for (int i = 0; i < count; ++i) {
    Vec v(n);
    for (auto& x : v) x = N(rng);
    out.push_back(v);
  }
  return out;
}

inline CheckResult check_symplectic(const CheckOptions& o = {}) {
  CheckResult r{6, "symplectic"};
  std::mt19937_64 rng(o.seed + 6);
  Example ho = make_example("harmonic-oscillator");
  IntegratorConfig ic;
  ic.step = 1e-4;
  ic.n_steps = 10000;
  ic.projection_tol = 1e-13;
  const double d_ho = symplectic_defect(ho.system, ho.initial, ic, random_directions(rng, flat_dim(ho.system.shape), 3));
  Example veh = make_example("vehicle-se2");
  auto dirs = random_directions(rng, flat_dim(veh.system.shape), 3);
  std::vector<double> seq;
  for (int j = 0; j <= o.halvings; ++j) {
    IntegratorConfig vc;
    vc.step = 0.1 / (1 << j);
    vc.n_steps = 5 * (1 << j);
    vc.projection_tol = 1e-12;
    seq.push_back(symplectic_defect(veh.system, veh.initial, vc, dirs));
  }
  bool monotone = seq.size() > 1;
  for (size_t i = 1; i < seq.size(); ++i) monotone = monotone && seq[i] < seq[i - 1];
  r.passed = d_ho <= 1e-6 && monotone;
  r.detail = "oscillator defect " + checks::sci(d_ho) + "; vehicle defects " + checks::ratios_text(seq) +
             (monotone ? " (decreasing)" : " (not decreasing)");
  return r;
}

inline CheckResult check_gnh(const CheckOptions& o = {}) {
  CheckResult r{7, "gnh"};
  Example toy = make_example("singular-toy");
  GnhReport rep = gnh_run(toy.system, gnh_seeds(toy, o.seed));
  int found = 0;
  std::function<Vec(const UnifiedPoint&)> psi;
  for (const auto& l : rep.levels) {
    found += l.n_new_constraints;
    if (l.n_new_constraints > 0) psi = l.constraint;
  }
  // The discovered function must be a nonzero multiple of p_2.
  double fit = std::numeric_limits<double>::infinity(), scale = 0.0;
  if (found == 1 && psi) {
    std::mt19937_64 rng(o.seed + 7);
    std::vector<double> a, b;
    for (int i = 0; i < 20; ++i) {
      UnifiedPoint w = random_point(toy.system.shape, rng, 1.0);
      a.push_back(psi(w)[0]);
      b.push_back(w.p(0, 1));
    }
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.size(); ++i) num += a[i] * b[i], den += b[i] * b[i];
    scale = num / den;
    fit = 0.0;
    for (size_t i = 0; i < a.size(); ++i) fit = std::max(fit, std::abs(a[i] - scale * b[i]));
  }
  const bool toy_ok = rep.status == GnhStatus::Converged && found == 1 && rep.levels.size() <= 3 && fit <= 1e-8 &&
                      std::abs(scale) > 1e-3;
  r.detail = "singular-toy: " + std::string(to_string(rep.status)) + ", levels " + std::to_string(rep.levels.size()) +
             ", new constraints " + std::to_string(found) + ", |psi - c p2| " + checks::sci(fit);
  bool regular_ok = true;
  for (const char* name : {"vehicle-se2", "rigid-body", "vector-space", "harmonic-oscillator", "quartic-oscillator", "so3-spline"}) {
    Example ex = make_example(name);
    GnhReport g = gnh_run(ex.system, gnh_seeds(ex, o.seed));
    const bool ok = g.status == GnhStatus::Converged && g.levels.size() == 1 && g.levels[0].n_new_constraints == 0;
    if (!ok) r.detail += std::string("; ") + name + " did not converge at level 1";
    regular_ok = regular_ok && ok;
  }
  if (regular_ok) r.detail += "; regular instances converge at level 1";
  r.passed = toy_ok && regular_ok;
  return r;
}

inline UnifiedVectorField random_field(const BundleShape& s, std::mt19937_64& rng) {
  return field_from_tangent(s, checks::random_vec(rng, flat_dim(s), 1.0));
}

inline CheckResult check_omega(const CheckOptions& o = {}) {
  CheckResult r{8, "omega"};
  std::mt19937_64 rng(o.seed + 8);
  double anti = 0.0, kernel = 0.0;
  for (const char* name : {"vehicle-se2", "so3-spline"}) {
    Example ex = make_example(name);
    const auto& s = ex.system.shape;
    for (int i = 0; i < 500; ++i) {
      UnifiedPoint w = random_point(s, rng, 1.0);
      UnifiedVectorField X = random_field(s, rng), Y = random_field(s, rng);
      anti = std::max(anti, std::abs(omega_pairing(ex.system, w, X, Y) + omega_pairing(ex.system, w, Y, X)));
      UnifiedVectorField K(s);
      for (int A = 0; A < s.m; ++A) K.F(s.k, A) = X.F(s.k, A);
      for (int b = 0; b < s.d; ++b) K.xi1(s.k, b) = X.xi1(s.k, b);
      kernel = std::max(kernel, std::abs(omega_pairing(ex.system, w, K, Y)));
    }
  }
  r.passed = anti <= 1e-12 && kernel <= 1e-12;
  r.detail = "antisymmetry " + checks::sci(anti) + ", top-slot pairing " + checks::sci(kernel);
  return r;
}

inline CheckResult check_ocp(const CheckOptions& = {}) {
  CheckResult r{9, "ocp"};
  ReducedOcp di = double_integrator_ocp();
  UnifiedSystem dsys = ocp_system(di, "double-integrator");
  BvpResult dres = solve_bvp(di, dsys, double_integrator_bc());
  double uerr = 0.0;
  for (size_t i = 0; i < dres.controls.size(); ++i)
    uerr = std::max(uerr, std::abs(dres.controls[i][0] - double_integrator_control(dres.traj.times[i])));
  const double cost_err = std::abs(dres.cost - double_integrator_cost()) / double_integrator_cost();
  Example veh = make_example("vehicle-se2");
  bool veh_ok = false;
  std::string vdetail;
  try {
    BvpResult vres = solve_bvp(*veh.ocp, veh.system, veh.boundary->bc, {}, veh.boundary->guess);
    RoundTripReport rt = round_trip(*veh.ocp, veh.system, vres);
    veh_ok = rt.force_residual <= 1e-5 && rt.constraint_residual <= 1e-5;
    vdetail = "vehicle: " + std::to_string(vres.iterations) + " Newton iterations, force residual " +
              checks::sci(rt.force_residual) + ", Phi residual " + checks::sci(rt.constraint_residual);
  } catch (const ShootingDiverged& e) {
    vdetail = "vehicle: shooting diverged, best mismatch " + checks::sci(e.best_residual);
  }
  r.passed = cost_err <= 1e-5 && uerr <= 1e-6 && veh_ok;
  r.detail = "double integrator cost rel err " + checks::sci(cost_err) + ", control err " + checks::sci(uerr) + "; " + vdetail;
  return r;
}

struct CheckEntry {
  int id;
  std::string name;
  double time_limit;  // seconds; 0 for none
  std::function<CheckResult(const CheckOptions&)> run;
};

inline std::vector<CheckEntry> check_registry() {
  return {
      {1, "det-A", 1.0, check_det_a},
      {2, "constraints", 1.0, check_constraint_reproduction},
      {3, "ep-oracle", 10.0, check_ep_oracle},
      {4, "el-order", 0.0, check_el_order},
      {5, "h-order", 0.0, check_h_order},
      {6, "symplectic", 0.0, check_symplectic},
      {7, "gnh", 0.0, check_gnh},
      {8, "omega", 0.0, check_omega},
      {9, "ocp", 60.0, check_ocp},
  };
}

// Runs one entry, timing it and folding any library error into a failure.
inline CheckResult run_check(const CheckEntry& e, const CheckOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = e.run(o);
  } catch (const Error& err) {
    r = CheckResult{e.id, e.name, false, std::string("error ") + to_string(err.code()) + ": " + err.what()};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (e.time_limit > 0.0 && r.seconds > e.time_limit) {
    r.passed = false;
    r.detail += "; exceeded " + checks::sci(e.time_limit) + " s";
  }
  return r;
}

}  // namespace unimech

#endif  // UNIMECH_CHECKS_HPP
