#ifndef UNIMECH_EXAMPLES_HPP
#define UNIMECH_EXAMPLES_HPP

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "unimech/gnh.hpp"
#include "unimech/optimal_control.hpp"
#include "unimech/residuals.hpp"

namespace unimech {

// ---------------------------------------------------------------- vehicle

struct VehicleParams {
  double m_mass = 1.0;
  double J1 = 1.0;
  double J2 = 1.0;
  double p_offset = 1.0;
  double rho1 = 1.0;
  double rho2 = 1.0;

  void validate() const {
    for (double v : {m_mass, J1, J2, p_offset, rho1, rho2})
      if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::ConfigError, "vehicle parameters must be positive");
  }
};

// M = S1 (thrust angle gamma), G = SE(2). Sections are ordered (X; Xi_1, Xi_2, Xi_3).
inline auto vehicle_system(const VehicleParams& prm) {
  prm.validate();
  auto L = [prm](const auto& q, const auto& qd, const auto& xi) {
    (void)q;
    return 0.5 * prm.m_mass * (xi[0] * xi[0] + xi[1] * xi[1]) + (0.5 * (prm.J1 + prm.J2)) * xi[2] * xi[2] +
           prm.J2 * xi[2] * qd[0] + (0.5 * prm.J2) * qd[0] * qd[0];
  };
  auto sections = [prm](const auto& q) {
    using T = typename std::decay_t<decltype(q)>::value_type;
    using std::cos, std::sin;
    const T c = cos(q[0]), s = sin(q[0]);
    const T zero(0.0), one(1.0);
    return std::vector<std::vector<T>>{
        {zero, c, s, zero},
        {one, zero, zero, zero},
        {zero, -s, c, zero},
        {zero, zero, one, T(1.0 / prm.p_offset)},
    };
  };
  auto cost = [prm](const auto& q, const auto& qd, const auto& xi, const auto& u) {
    (void)q;
    (void)qd;
    (void)xi;
    return prm.rho1 * u[0] * u[0] + prm.rho2 * u[1] * u[1];
  };
  return make_controlled_system(1, 3, 2, make_group("SE2"), L, sections, cost);
}

inline ReducedOcp vehicle_ocp(const VehicleParams& prm) { return build_reduced_ocp(vehicle_system(prm)); }

inline UnifiedSystem vehicle_unified(const VehicleParams& prm) { return ocp_system(vehicle_ocp(prm), "vehicle-se2"); }

// Vehicle jet (gamma, gamma', gamma'', xi, xi') as a k = 2 state.
inline HigherOrderState vehicle_state(double gamma, double gdot, double gddot, const Vec& xi, const Vec& xidot,
                                      const Vec& g = Vec::Zero(3)) {
  HigherOrderState s(BundleShape{1, 3, 2});
  s.q(0, 0) = gamma;
  s.q(1, 0) = gdot;
  s.q(2, 0) = gddot;
  s.xi.set_row(0, xi);
  s.xi.set_row(1, xidot);
  s.g = g;
  return s;
}

// Default vehicle point on W_c with deterministic momentum seeds.
inline UnifiedPoint vehicle_default_point(const UnifiedSystem& sys) {
  UnifiedPoint w(sys.shape);
  w.base = vehicle_state(0.6, 0.1, 0.0, Vec(Eigen::Vector3d(0.4, 0.1, 0.2)), Vec::Zero(3));
  w.p(0, 0) = 0.05;
  w.p(1, 0) = 0.1;
  w.alpha.set_row(0, Vec(Eigen::Vector3d(0.02, -0.03, 0.01)));
  w.alpha.set_row(1, Vec(Eigen::Vector3d(0.05, 0.02, -0.04)));
  return complete_velocities(sys, w);
}

struct RegularityResult {
  Mat A;
  double det = 0.0;
};

// Bordered matrix in the order (gamma'', xi'_1, xi'_2, xi'_3, lambda_1, lambda_2).
inline RegularityResult vehicle_regularity_matrix(const VehicleParams& prm, const UnifiedPoint& w) {
  if (!std::isfinite(w.base.q(0, 0))) throw Error(ErrorCode::NonFinite, "gamma must be finite");
  UnifiedSystem sys = vehicle_unified(prm);
  RegularityResult r;
  r.A = bordered_matrix(sys, w);
  r.det = r.A.determinant();
  return r;
}

inline RegularityResult vehicle_regularity_matrix(const VehicleParams& prm, const HigherOrderState& s) {
  UnifiedPoint w(s.shape);
  w.base = s;
  return vehicle_regularity_matrix(prm, w);
}

// The displayed regularity matrix, typed in directly (J1 = J2 = m = p = 1).
inline Mat vehicle_displayed_matrix(double gamma, double rho1, double rho2) {
  const double c = std::cos(gamma), s = std::sin(gamma);
  Mat A(6, 6);
  A << 2 * rho2, 0, 0, 2 * rho2, 0, 1,
       0, 2 * rho1 * c * c, 2 * rho1 * s * c, 0, -s, 0,
       0, 2 * rho1 * s * c, 2 * rho1 * s * s, 0, c, 1,
       2 * rho2, 0, 0, 2 * rho2, 0, 2,
       0, -s, c, 0, 0, 0,
       1, 0, 1, 2, 0, 0;
  return A;
}

// Reference vehicle formulas, re-typed. Arguments use the state jet above.
namespace vehicle_reference {

inline double phi1(const VehicleParams& P, const HigherOrderState& s) {
  const double g = s.q(0, 0), gd = s.q(1, 0);
  const double x1 = s.xi(0, 0), x3 = s.xi(0, 2), x1d = s.xi(1, 0), x2d = s.xi(1, 1);
  return P.m_mass * (std::cos(g) * (x2d - x1 * x3) - std::sin(g) * x1d) + x1 * x3 * (P.J1 + P.J2) * std::cos(g) +
         P.J2 * x1 * gd * std::cos(g);
}

inline double phi2(const VehicleParams& P, const HigherOrderState& s) {
  const double gd = s.q(1, 0), gdd = s.q(2, 0), p = P.p_offset;
  const double x1 = s.xi(0, 0), x2 = s.xi(0, 1), x3 = s.xi(0, 2), x2d = s.xi(1, 1), x3d = s.xi(1, 2);
  return (P.J1 + P.J2) / p * (x3d + p * x1 * x3) + P.J2 / p * (gdd + p * x1 * gd) +
         P.m_mass * (x2d - x1 * x3 - (x2 * x1 + x3 * x2) / p);
}

inline double u1(const VehicleParams& P, const HigherOrderState& s) {
  const double g = s.q(0, 0), gd = s.q(1, 0);
  const double x1 = s.xi(0, 0), x3 = s.xi(0, 2), x1d = s.xi(1, 0), x2d = s.xi(1, 1);
  return P.m_mass * (std::cos(g) * x1d + std::sin(g) * (x2d - x1 * x3)) + (P.J1 + P.J2) * x1 * x3 * std::sin(g) +
         P.J2 * x1 * gd * std::sin(g);
}

inline double u2(const VehicleParams& P, const HigherOrderState& s) { return P.J2 * (s.xi(1, 2) + s.q(2, 0)); }

inline double ltilde(const VehicleParams& P, const HigherOrderState& s) {
  const double a = u1(P, s), b = s.xi(1, 2) + s.q(2, 0);
  return P.rho1 * a * a + P.rho2 * P.J2 * P.J2 * b * b;
}

// Reduced controlled equations (left side minus right side), four rows.
inline Vec controlled_equations(const VehicleParams& P, const HigherOrderState& s, double uu1, double uu2) {
  const double g = s.q(0, 0), gd = s.q(1, 0), gdd = s.q(2, 0), p = P.p_offset, m = P.m_mass;
  const double x1 = s.xi(0, 0), x2 = s.xi(0, 1), x3 = s.xi(0, 2);
  const double x1d = s.xi(1, 0), x2d = s.xi(1, 1), x3d = s.xi(1, 2);
  Vec r(4);
  r[0] = m * x1d - uu1 * std::cos(g);
  r[1] = m * x2d + (P.J1 + P.J2) * x1 * x3 + P.J2 * x1 * gd - m * x1 * x3 - uu1 * std::sin(g);
  r[2] = (P.J1 + P.J2) * x3d + P.J2 * gdd - m * x2 * (x1 + x3) + uu1 * p * std::sin(g);
  r[3] = P.J2 * (x3d + gdd) - uu2;
  return r;
}

inline void guard_tan(double gamma) {
  if (std::abs(std::tan(gamma)) < 1e-6 || !std::isfinite(std::tan(gamma)))
    throw Error(ErrorCode::NonFinite, "intrinsic chart undefined where tan(gamma) vanishes");
}

// Accelerations solved from the constraints: (gamma'', xi'_1).
inline std::array<double, 2> intrinsic_accelerations(const VehicleParams& P, const HigherOrderState& s) {
  const double g = s.q(0, 0), gd = s.q(1, 0), p = P.p_offset, m = P.m_mass;
  guard_tan(g);
  const double x1 = s.xi(0, 0), x2 = s.xi(0, 1), x3 = s.xi(0, 2), x2d = s.xi(1, 1), x3d = s.xi(1, 2);
  const double gdd = -m * p / P.J2 * (x2d - x1 * x3 - x2 * (x1 + x3) / p) - (P.J1 + P.J2) / P.J2 * (x3d + p * x1 * x3) -
                     p * x1 * gd;
  const double x1d = 1.0 / std::tan(g) * ((P.J1 + P.J2) / m * x1 * x3 + P.J2 / m * x1 * gd + x2d - x1 * x3);
  return {gdd, x1d};
}

inline double ltilde_intrinsic(const VehicleParams& P, const HigherOrderState& s) {
  const double g = s.q(0, 0), gd = s.q(1, 0), p = P.p_offset, m = P.m_mass;
  guard_tan(g);
  const double x1 = s.xi(0, 0), x2 = s.xi(0, 1), x3 = s.xi(0, 2), x2d = s.xi(1, 1), x3d = s.xi(1, 2);
  const double inner = (P.J1 + P.J2) / m * x1 * x3 + P.J2 / m * x1 * gd + x2d - x1 * x3;
  const double a = m * std::cos(g) / std::tan(g) * inner + (P.J1 + P.J2) * x1 * x3 * std::sin(g) +
                   P.J2 * x1 * gd * std::sin(g) + std::sin(g) * (x2d - x1 * x3);
  const double b = x3d - m * p / P.J2 * (x2d - x1 * x3 - x2 * (x1 + x3) / p) - (P.J1 + P.J2) / P.J2 * (x3d + p * x1 * x3) -
                   p * x1 * gd;
  return P.rho1 * a * a + P.rho2 * P.J2 * P.J2 * b * b;
}

}  // namespace vehicle_reference

// Unreduced vehicle kinetic energy in (x, y, theta, gamma) and their rates.
inline double vehicle_unreduced_lagrangian(const VehicleParams& P, const Eigen::Vector4d& conf,
                                           const Eigen::Vector4d& rate) {
  (void)conf;
  const double xd = rate[0], yd = rate[1], td = rate[2], gd = rate[3];
  return 0.5 * P.m_mass * (xd * xd + yd * yd) + 0.5 * P.J1 * td * td + 0.5 * P.J2 * (td + gd) * (td + gd);
}

// Reduced Lagrangian at (gamma-dot, xi).
inline double vehicle_reduced_lagrangian(const VehicleParams& P, double gdot, const Vec& xi) {
  auto cs = vehicle_system(P);
  return cs.L(std::vector<double>{0.0}, std::vector<double>{gdot}, std::vector<double>{xi[0], xi[1], xi[2]});
}

// Body velocity (xi) of a chart velocity (x', y', theta') at heading theta.
inline Vec se2_body_velocity(double theta, const Eigen::Vector3d& rate) {
  const double c = std::cos(theta), s = std::sin(theta);
  Vec xi(3);
  xi[0] = c * rate[0] + s * rate[1];
  xi[1] = -(-s * rate[0] + c * rate[1]);
  xi[2] = rate[2];
  return xi;
}

inline BoundaryConditions bc_from_flow(const UnifiedSystem& sys, const BoundaryConditions& start, const Vec& z,
                                       const BvpConfig& cfg = {}) {
  BoundaryConditions bc = start;
  UnifiedPoint wT = flow(sys, bvp_initial_point(sys, bc, z), bvp_integrator(bc, cfg));
  bc.qT = wT.base.q.row_vec(0);
  bc.qdT = wT.base.q.row_vec(1);
  bc.xiT = wT.base.xi.row_vec(0);
  bc.gT = wT.base.g;
  return bc;
}

struct OcpInstance {
  BoundaryConditions bc;
  Vec guess;  // momentum seeds (p^0, p^1, alpha_0, alpha_1)
};

// Short maneuver: the terminal state is reached from the reference seeds
// plus a small perturbation; the solve starts at the reference seeds.
inline OcpInstance vehicle_transfer(const UnifiedSystem& sys, double T = 1.0, const BvpConfig& cfg = {}) {
  BoundaryConditions bc;
  bc.T = T;
  bc.q0 = Vec::Constant(1, 0.3);
  bc.qd0 = Vec::Zero(1);
  bc.xi0 = Vec(Eigen::Vector3d(0.5, 0.0, 0.0));
  bc.g0 = Vec::Zero(3);
  OcpInstance inst;
  inst.guess = Vec(8);
  inst.guess << 0.4, -0.6, 0.2, 0.4, -0.2, 0.6, 0.4, -0.4;
  Vec dz(8);
  dz << 0.06, 0.02, -0.04, 0.05, 0.03, -0.02, 0.01, 0.04;
  inst.bc = bc_from_flow(sys, bc, inst.guess + dz, cfg);
  return inst;
}

// ------------------------------------------------------------- rigid body

inline UnifiedSystem rigid_body_system(const Eigen::Vector3d& I = {1.0, 2.0, 3.0}) {
  if ((I.array() <= 0.0).any()) throw Error(ErrorCode::ConfigError, "inertias must be positive");
  auto L = [I](const auto& s) {
    using T = typename std::decay_t<decltype(s)>::scalar_type;
    T acc(0.0);
    for (int b = 0; b < 3; ++b) acc = acc + (0.5 * I[b]) * s.xi(0, b) * s.xi(0, b);
    return acc;
  };
  return make_system(BundleShape{0, 3, 1}, make_group("SO3"), make_scalar(L, false, "l"), {}, "rigid-body");
}

inline UnifiedPoint rigid_body_point(const Eigen::Vector3d& I, const Eigen::Vector3d& xi0) {
  UnifiedPoint w(BundleShape{0, 3, 1});
  w.base.xi.set_row(0, Vec(xi0));
  w.alpha.set_row(0, Vec(I.cwiseProduct(xi0)));
  return w;
}

// Euler's equations I w' = I w x w by classical RK4, independent of the library.
inline std::vector<Eigen::Vector3d> rigid_body_oracle(const Eigen::Vector3d& I, const Eigen::Vector3d& xi0, double T,
                                                      double h) {
  if ((I.array() <= 0.0).any()) throw Error(ErrorCode::ConfigError, "inertias must be positive");
  auto f = [&](const Eigen::Vector3d& w) -> Eigen::Vector3d {
    return (I.cwiseProduct(w)).cross(w).cwiseQuotient(I);
  };
  const int n = static_cast<int>(std::llround(T / h));
  std::vector<Eigen::Vector3d> out{xi0};
  Eigen::Vector3d w = xi0;
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d k1 = f(w), k2 = f(w + 0.5 * h * k1), k3 = f(w + 0.5 * h * k2), k4 = f(w + h * k3);
    w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back(w);
  }
  return out;
}

// ------------------------------------------------------------ small systems

// Quadratic L over M = R^mv with a configurable group:
// L = 1/2 |q'|^2 - 1/2 omega^2 |q|^2 + 1/2 |xi|^2.
inline UnifiedSystem vector_space_system(int mv = 2, const std::string& group = "S1", double omega = 1.0) {
  GroupPtr G = make_group(group);
  auto L = [mv, omega, d = G->dim()](const auto& s) {
    using T = typename std::decay_t<decltype(s)>::scalar_type;
    T acc(0.0);
    for (int A = 0; A < mv; ++A) acc = acc + 0.5 * s.q(1, A) * s.q(1, A) - (0.5 * omega * omega) * s.q(0, A) * s.q(0, A);
    for (int b = 0; b < d; ++b) acc = acc + 0.5 * s.xi(0, b) * s.xi(0, b);
    return acc;
  };
  return make_system(BundleShape{mv, G->dim(), 1}, G, make_scalar(L, false, "L"), {}, "vector-space");
}

// L = 1/2 q1'^2 over R^2.
inline UnifiedSystem singular_toy_system() {
  auto L = [](const auto& s) { return 0.5 * s.q(1, 0) * s.q(1, 0); };
  return make_system(BundleShape{2, 0, 1}, make_group("R^0"), make_scalar(L, false, "L"), {}, "singular-toy");
}

inline UnifiedSystem harmonic_oscillator_system() {
  auto L = [](const auto& s) { return 0.5 * s.q(1, 0) * s.q(1, 0) - 0.5 * s.q(0, 0) * s.q(0, 0); };
  return make_system(BundleShape{1, 0, 1}, make_group("R^0"), make_scalar(L, false, "L"), {}, "harmonic-oscillator");
}

// Constant constraint: W_c is empty.
inline UnifiedSystem infeasible_toy_system() {
  auto L = [](const auto& s) { return 0.5 * (s.q(1, 0) * s.q(1, 0) + s.q(1, 1) * s.q(1, 1)); };
  auto phi = [](const auto& s) {
    using T = typename std::decay_t<decltype(s)>::scalar_type;
    return T(1.0) + 0.0 * s.q(0, 0);
  };
  return make_system(BundleShape{2, 0, 1}, make_group("R^0"), make_scalar(L, false, "L"),
                     {make_scalar(phi, false, "one")}, "infeasible-toy");
}

// Regular second-order system with a position-dependent acceleration weight:
// L = 1/2 (1 + q^2) q''^2 - 5/2 q'^2 + 2 q^2.
inline UnifiedSystem quartic_oscillator_system() {
  auto L = [](const auto& s) {
    const auto& q = s.q(0, 0);
    return 0.5 * (1.0 + q * q) * s.q(2, 0) * s.q(2, 0) - 2.5 * s.q(1, 0) * s.q(1, 0) + 2.0 * q * q;
  };
  return make_system(BundleShape{1, 0, 2}, make_group("R^0"), make_scalar(L, false, "L"), {}, "quartic-oscillator");
}

// Second-order Euler-Poincare system on SO(3).
inline UnifiedSystem so3_spline_system(const Eigen::Vector3d& I = {1.0, 2.0, 3.0}) {
  auto L = [I](const auto& s) {
    using T = typename std::decay_t<decltype(s)>::scalar_type;
    T acc(0.0);
    for (int b = 0; b < 3; ++b) acc = acc + (0.5 * I[b]) * s.xi(1, b) * s.xi(1, b) + 0.5 * s.xi(0, b) * s.xi(0, b);
    return acc;
  };
  return make_system(BundleShape{0, 3, 2}, make_group("SO3"), make_scalar(L, false, "L"), {}, "so3-spline");
}

// Double integrator q'' = u with cost rho u^2; fully actuated, so the
// reduction has no constraints and L~ = rho q''^2.
inline ReducedOcp double_integrator_ocp(double rho = 1.0) {
  ReducedOcp ocp;
  ocp.shape = BundleShape{1, 0, 2};
  ocp.group = make_group("R^0");
  ocp.r = 1;
  auto L = [rho](const auto& s) { return rho * s.q(2, 0) * s.q(2, 0); };
  ocp.Ltilde = make_scalar(L, false, "Ltilde");
  ocp.controls = [](const HigherOrderState& s) { return Vec(Vec::Constant(1, s.q(2, 0))); };
  ocp.forces = [](const HigherOrderState& s) { return Vec(Vec::Constant(1, s.q(2, 0))); };
  ocp.sections = [](const Vec&) { return Mat(Mat::Identity(1, 1)); };
  return ocp;
}

// Rest-to-rest transfer 0 -> 1 on [0, T].
inline BoundaryConditions double_integrator_bc(double T = 1.0, double target = 1.0) {
  BoundaryConditions bc;
  bc.T = T;
  bc.q0 = Vec::Zero(1);
  bc.qd0 = Vec::Zero(1);
  bc.qT = Vec::Constant(1, target);
  bc.qdT = Vec::Zero(1);
  bc.xi0 = bc.xiT = bc.g0 = bc.gT = Vec::Zero(0);
  return bc;
}

// Minimum-effort law u(t) = 6D/T^2 - 12Dt/T^3 and its cost.
inline double double_integrator_control(double t, double T = 1.0, double target = 1.0) {
  return 6.0 * target / (T * T) - 12.0 * target * t / (T * T * T);
}
inline double double_integrator_cost(double T = 1.0, double target = 1.0, double rho = 1.0) {
  return rho * 12.0 * target * target / (T * T * T);
}

// ---------------------------------------------------------------- registry

struct Example {
  std::string name;
  std::string description;
  UnifiedSystem system;
  UnifiedPoint initial;
  IntegratorConfig integrator;
  std::optional<ReducedOcp> ocp;
  std::optional<OcpInstance> boundary;
};

// Random point near the origin with the given jet scale; not projected.
inline UnifiedPoint random_point(const BundleShape& s, std::mt19937_64& rng, double scale = 0.5) {
  std::uniform_real_distribution<double> U(-scale, scale);
  UnifiedPoint w(s);
  for (auto& v : w.base.q.data) v = U(rng);
  for (auto& v : w.base.xi.data) v = U(rng);
  for (auto& v : w.base.g) v = U(rng);
  for (auto& v : w.p.data) v = U(rng);
  for (auto& v : w.alpha.data) v = U(rng);
  return w;
}

inline std::vector<std::string> example_names() {
  return {"vehicle-se2",        "rigid-body",         "vector-space", "singular-toy",  "harmonic-oscillator",
          "quartic-oscillator", "so3-spline",         "infeasible-toy", "double-integrator"};
}

inline Example make_example(const std::string& name, const VehicleParams& vp = {}) {
  Example ex;
  ex.name = name;
  ex.integrator.step = 1e-3;
  ex.integrator.n_steps = 1000;
  if (name == "vehicle-se2") {
    ex.description = "SE(2) x S1 underactuated vehicle, reduced optimal control problem";
    ex.ocp = vehicle_ocp(vp);
    ex.system = ocp_system(*ex.ocp, name);
    ex.initial = vehicle_default_point(ex.system);
    ex.boundary = vehicle_transfer(ex.system);
    ex.integrator.step = 1e-2;
    ex.integrator.n_steps = 100;
  } else if (name == "rigid-body") {
    ex.description = "free rigid body on SO(3), I = (1, 2, 3)";
    ex.system = rigid_body_system();
    ex.initial = rigid_body_point({1.0, 2.0, 3.0}, {1.0, 0.1, 0.5});
  } else if (name == "vector-space") {
    ex.description = "quadratic Lagrangian on R^2 x S1";
    ex.system = vector_space_system();
    UnifiedPoint w(ex.system.shape);
    w.base.q(0, 0) = 1.0;
    w.base.q(1, 1) = 0.5;
    w.base.xi(0, 0) = 0.3;
    w.p(0, 1) = 0.5;
    w.alpha(0, 0) = 0.3;
    ex.initial = w;
  } else if (name == "singular-toy") {
    ex.description = "L = q1'^2 / 2 over R^2";
    ex.system = singular_toy_system();
    UnifiedPoint w(ex.system.shape);
    w.base.q(1, 0) = 1.0;
    w.p(0, 0) = 1.0;
    ex.initial = w;
  } else if (name == "harmonic-oscillator") {
    ex.description = "L = (q'^2 - q^2) / 2";
    ex.system = harmonic_oscillator_system();
    UnifiedPoint w(ex.system.shape);
    w.base.q(0, 0) = 1.0;
    w.p(0, 0) = 0.0;
    ex.initial = w;
  } else if (name == "quartic-oscillator") {
    ex.description = "second-order oscillator with a quartic potential";
    ex.system = quartic_oscillator_system();
    UnifiedPoint w(ex.system.shape);
    w.base.q(0, 0) = 0.5;
    w.base.q(1, 0) = 0.1;
    w.p(0, 0) = 0.2;
    ex.initial = complete_velocities(ex.system, w);
  } else if (name == "so3-spline") {
    ex.description = "second-order Euler-Poincare system on SO(3)";
    ex.system = so3_spline_system();
    UnifiedPoint w(ex.system.shape);
    w.base.xi.set_row(0, Vec(Eigen::Vector3d(0.5, -0.2, 0.3)));
    w.alpha.set_row(0, Vec(Eigen::Vector3d(0.1, 0.2, -0.1)));
    w.alpha.set_row(1, Vec(Eigen::Vector3d(0.2, 0.1, 0.05)));
    ex.initial = complete_velocities(ex.system, w);
  } else if (name == "infeasible-toy") {
    ex.description = "constant constraint, empty compatibility set";
    ex.system = infeasible_toy_system();
    ex.initial = UnifiedPoint(ex.system.shape);
  } else if (name == "double-integrator") {
    ex.description = "minimum-effort rest-to-rest double integrator";
    ex.ocp = double_integrator_ocp();
    ex.system = ocp_system(*ex.ocp, name);
    ex.boundary = OcpInstance{double_integrator_bc(), Vec::Zero(2)};
    UnifiedPoint w(ex.system.shape);
    ex.initial = complete_velocities(ex.system, w);
    ex.integrator.step = 1e-2;
    ex.integrator.n_steps = 100;
  } else {
    throw Error(ErrorCode::ConfigError, "unknown problem: " + name);
  }
  return ex;
}

inline bool is_example(const std::string& name) {
  for (const auto& n : example_names())
    if (n == name) return true;
  return false;
}

// Deterministic GNH seeds around the example's initial point.
inline std::vector<UnifiedPoint> gnh_seeds(const Example& ex, unsigned seed, int count = 6) {
  std::mt19937_64 rng(seed);
  std::vector<UnifiedPoint> out;
  for (int i = 0; i < count; ++i) {
    UnifiedPoint w = random_point(ex.system.shape, rng, 0.5);
    if (ex.name == "vehicle-se2") w.base.q(0, 0) = 0.3 + 0.8 * (i + 1) / count;
    out.push_back(w);
  }
  return out;
}

}  // namespace unimech

#endif  // UNIMECH_EXAMPLES_HPP
