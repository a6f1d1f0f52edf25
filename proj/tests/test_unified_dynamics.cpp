#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "unimech/examples.hpp"

using namespace unimech;

namespace {

Vec rand_vec(std::mt19937_64& rng, int n, double a = 1.0) {
  std::uniform_real_distribution<double> U(-a, a);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = U(rng);
  return v;
}

UnifiedSystem free_particle() {
  auto L = [](const auto& s) { return 0.5 * s.q(1, 0) * s.q(1, 0); };
  return make_system(BundleShape{1, 0, 1}, make_group("R^0"), make_scalar(L, false), {}, "free");
}

// L = 1/2 q_k^T M q_k + c.q_k + q_0.q_1 for k = 1, M = R^2.
UnifiedSystem quadratic_system(const Mat& M, const Vec& c) {
  auto L = [M, c](const auto& s) {
    using T = typename std::decay_t<decltype(s)>::scalar_type;
    T acc(0.0);
    for (int A = 0; A < 2; ++A) {
      acc = acc + c[A] * s.q(1, A) + s.q(0, A) * s.q(1, A);
      for (int B = 0; B < 2; ++B) acc = acc + (0.5 * M(A, B)) * s.q(1, A) * s.q(1, B);
    }
    return acc;
  };
  return make_system(BundleShape{2, 0, 1}, make_group("R^0"), make_scalar(L, false), {}, "quadratic");
}

Trajectory sampled(const std::vector<UnifiedPoint>& pts, double h) {
  Trajectory t;
  for (size_t i = 0; i < pts.size(); ++i) {
    t.times.push_back(i * h);
    t.points.push_back(pts[i]);
  }
  return t;
}

}  // namespace

TEST(UnifiedDynamics, HamiltonianIsKineticEnergyOnLegendreMatch) {
  auto sys = free_particle();
  UnifiedPoint w(sys.shape);
  w.base.q(1, 0) = 1.7;
  w.p(0, 0) = 1.7;
  EXPECT_DOUBLE_EQ(hamiltonian(sys, w), 0.5 * 1.7 * 1.7);
}

TEST(UnifiedDynamics, ZeroLagrangianHamiltonianIsCoupling) {
  auto L = [](const auto& s) { return 0.0 * s.q(0, 0); };
  auto sys = make_system(BundleShape{1, 3, 2}, make_group("SE2"), make_scalar(L, false));
  std::mt19937_64 rng(1);
  UnifiedPoint w = random_point(sys.shape, rng, 1.0);
  EXPECT_EQ(hamiltonian(sys, w), coupling(w));
}

TEST(UnifiedDynamics, OmegaAbelianExample) {
  auto L = [](const auto& s) { return 0.5 * s.xi(0, 0) * s.xi(0, 0); };
  auto sys = make_system(BundleShape{0, 1, 1}, make_group("R^1"), make_scalar(L, false));
  UnifiedPoint w(sys.shape);
  UnifiedVectorField X1(sys.shape), X2(sys.shape);
  X1.xi1(0, 0) = 1;
  X2.nu(0, 0) = 3;
  EXPECT_EQ(omega_pairing(sys, w, X1, X2), 3.0);
}

TEST(UnifiedDynamics, OmegaAntisymmetryAndKernel) {
  Example ex = make_example("vehicle-se2");
  const auto& s = ex.system.shape;
  std::mt19937_64 rng(3);
  for (int n = 0; n < 100; ++n) {
    UnifiedPoint w = random_point(s, rng, 1.0);
    auto X = field_from_tangent(s, rand_vec(rng, flat_dim(s)));
    auto Y = field_from_tangent(s, rand_vec(rng, flat_dim(s)));
    EXPECT_EQ(omega_pairing(ex.system, w, X, X), 0.0);
    EXPECT_LE(std::abs(omega_pairing(ex.system, w, X, Y) + omega_pairing(ex.system, w, Y, X)), 1e-12);
    UnifiedVectorField K(s);
    for (int A = 0; A < s.m; ++A) K.F(s.k, A) = X.F(s.k, A);
    for (int b = 0; b < s.d; ++b) K.xi1(s.k, b) = X.xi1(s.k, b);
    EXPECT_EQ(omega_pairing(ex.system, w, K, Y), 0.0);
  }
}

TEST(UnifiedDynamics, LegendreMatchHasZeroResidual) {
  auto L = [](const auto& s) { return 0.5 * (s.q(2, 0) * s.q(2, 0) + s.q(2, 1) * s.q(2, 1)); };
  auto sys = make_system(BundleShape{2, 0, 2}, make_group("R^0"), make_scalar(L, false));
  std::mt19937_64 rng(5);
  UnifiedPoint w = random_point(sys.shape, rng, 1.0);
  w.p(1, 0) = w.base.q(2, 0);
  w.p(1, 1) = w.base.q(2, 1);
  EXPECT_EQ(wc_residual(sys, w).norm(), 0.0);
}

TEST(UnifiedDynamics, QuadraticResidualMatchesAffineOracle) {
  Mat M(2, 2);
  M << 2.0, 0.3, 0.3, 1.5;
  Vec c(2);
  c << 0.4, -0.7;
  auto sys = quadratic_system(M, c);
  std::mt19937_64 rng(7);
  for (int n = 0; n < 20; ++n) {
    UnifiedPoint w = random_point(sys.shape, rng, 2.0);
    Vec q0 = w.base.q.row_vec(0), q1 = w.base.q.row_vec(1), p = w.p.row_vec(0);
    Vec expect = p - (M * q1 + c + q0);
    EXPECT_LE((wc_residual(sys, w) - expect).norm(), 1e-12);
  }
}

TEST(UnifiedDynamics, FreeParticleField) {
  auto sys = free_particle();
  UnifiedPoint w(sys.shape);
  w.base.q(0, 0) = 0.3;
  w.base.q(1, 0) = 1.2;
  w.p(0, 0) = 1.2;
  auto X = solve_dynamics(sys, w);
  EXPECT_EQ(X.F(0, 0), 1.2);
  EXPECT_EQ(X.F(1, 0), 0.0);
  EXPECT_EQ(X.G(0, 0), 0.0);
}

TEST(UnifiedDynamics, BlockDiagonalHessianSplits) {
  auto joint = vector_space_system(2, "SE2", 1.3);
  auto m_only = vector_space_system(2, "R^0", 1.3);
  auto g_only = vector_space_system(0, "SE2", 1.3);
  std::mt19937_64 rng(9);
  for (int n = 0; n < 10; ++n) {
    UnifiedPoint w = project_wc(joint, random_point(joint.shape, rng, 1.0));
    UnifiedPoint wm(m_only.shape), wg(g_only.shape);
    wm.base.q = w.base.q;
    wm.p = w.p;
    wg.base.g = w.base.g;
    wg.base.xi = w.base.xi;
    wg.alpha = w.alpha;
    auto X = solve_dynamics(joint, w), Xm = solve_dynamics(m_only, wm), Xg = solve_dynamics(g_only, wg);
    for (int A = 0; A < 2; ++A) EXPECT_NEAR(X.F(1, A), Xm.F(1, A), 1e-10);
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(X.xi1(1, b), Xg.xi1(1, b), 1e-10);
  }
}

TEST(UnifiedDynamics, RigidBodyFieldReproducesEulerEquations) {
  Eigen::Vector3d I(1.0, 2.0, 3.0);
  auto sys = rigid_body_system(I);
  std::mt19937_64 rng(11);
  for (int n = 0; n < 10; ++n) {
    Eigen::Vector3d om = rand_vec(rng, 3);
    UnifiedPoint w = rigid_body_point(I, om);
    auto X = solve_dynamics(sys, w);
    Eigen::Vector3d expect = (I.cwiseProduct(om)).cross(om).cwiseQuotient(I);
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(X.xi1(1, b), expect[b], 1e-12);
    Eigen::Vector3d Iw = I.cwiseProduct(om);
    Eigen::Vector3d nu_expect = Iw.cross(om);
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(X.nu(0, b), nu_expect[b], 1e-12);
  }
}

TEST(UnifiedDynamics, FieldSatisfiesDynamicalEquation) {
  for (const char* name : {"quartic-oscillator", "so3-spline", "vector-space"}) {
    Example ex = make_example(name);
    const auto& s = ex.system.shape;
    std::mt19937_64 rng(13);
    UnifiedPoint w = project_wc(ex.system, random_point(s, rng, 0.5));
    auto X = solve_dynamics(ex.system, w);
    for (int n = 0; n < 50; ++n) {
      auto Y = field_from_tangent(s, rand_vec(rng, flat_dim(s)));
      for (int A = 0; A < s.m; ++A) Y.F(s.k, A) = 0.0;
      for (int b = 0; b < s.d; ++b) Y.xi1(s.k, b) = 0.0;
      double lhs = omega_pairing(ex.system, w, X, Y), rhs = dH_apply(ex.system, w, Y);
      EXPECT_LE(std::abs(lhs - rhs), 1e-9 * (1 + std::abs(rhs))) << name;
    }
  }
}

TEST(UnifiedDynamics, SingularHessianIsReported) {
  auto sys = singular_toy_system();
  UnifiedPoint w(sys.shape);
  w.base.q(1, 0) = 0.5;
  w.p(0, 0) = 0.5;
  try {
    solve_dynamics(sys, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularHessian);
  }
}

TEST(UnifiedDynamics, EmptyConstraintSetMatchesUnconstrainedSolve) {
  Example ex = make_example("so3-spline");
  std::mt19937_64 rng(17);
  UnifiedPoint w = project_wc(ex.system, random_point(ex.system.shape, rng, 0.5));
  auto a = solve_dynamics(ex.system, w);
  auto b = constrained_solve(ex.system, w).field;
  EXPECT_EQ(a.F, b.F);
  EXPECT_EQ(a.G, b.G);
  EXPECT_EQ(a.xi1, b.xi1);
  EXPECT_EQ(a.nu, b.nu);
}

TEST(UnifiedDynamics, LinearConstraintIsPreservedByTheFlow) {
  auto L = [](const auto& s) {
    return 0.5 * s.q(1, 0) * s.q(1, 0) - 0.5 * s.q(0, 0) * s.q(0, 0) +
           0.5 * (s.xi(0, 0) * s.xi(0, 0) + 2.0 * s.xi(0, 1) * s.xi(0, 1) + 3.0 * s.xi(0, 2) * s.xi(0, 2)) +
           0.2 * s.xi(0, 2) * s.q(1, 0);
  };
  auto phi = [](const auto& s) { return s.xi(0, 0); };
  auto sys = make_system(BundleShape{1, 3, 1}, make_group("SE2"), make_scalar(L, false), {make_scalar(phi, false)});
  UnifiedPoint w(sys.shape);
  w.base.q(0, 0) = 0.4;
  w.base.q(1, 0) = 0.2;
  w.base.xi.set_row(0, Vec(Eigen::Vector3d(0.3, -0.2, 0.5)));
  w = project_wc(sys, w);
  EXPECT_NEAR(w.base.xi(0, 0), 0.0, 1e-12);
  auto sol = constrained_solve(sys, w);
  EXPECT_NEAR(sol.field.xi1(1, 0), 0.0, 1e-10);
  EXPECT_EQ(sol.lambdas.size(), 1);

  IntegratorConfig cfg;
  cfg.step = 1e-2;
  cfg.n_steps = 100;
  auto [traj, log] = integrate(sys, w, cfg);
  for (size_t i = 1; i < traj.size(); ++i) {
    double rate = (traj.points[i].base.xi(0, 0) - traj.points[i - 1].base.xi(0, 0)) / cfg.step;
    EXPECT_LE(std::abs(rate), 1e-8);
  }
}

TEST(UnifiedDynamics, ConstrainedSolveChecksMembership) {
  auto sys = vehicle_unified(VehicleParams{});
  UnifiedPoint w = vehicle_default_point(sys);
  EXPECT_NO_THROW(constrained_solve(sys, w));
  w.base.xi(1, 0) += 0.5;
  try {
    constrained_solve(sys, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasiblePoint);
  }
}

TEST(UnifiedDynamics, BorderedMatrixDeterminant) {
  VehicleParams P;
  auto sys = vehicle_unified(P);
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> U(0.2, 1.3);
  for (int n = 0; n < 20; ++n) {
    UnifiedPoint w = random_point(sys.shape, rng, 0.5);
    w.base.q(0, 0) = U(rng);
    EXPECT_NEAR(bordered_matrix(sys, w).determinant(), 4.0 * P.rho1 * P.rho2, 1e-9 * 4.0);
  }
}

TEST(UnifiedDynamics, HamiltonEquationsForFreeMomenta) {
  BundleShape s{2, 0, 1};
  auto H = make_phase_scalar(
      [](const auto& x) { return 0.5 * (x.p(0, 0) * x.p(0, 0) + x.p(0, 1) * x.p(0, 1)); }, false);
  PhasePoint<double> x(s);
  x.q(0, 0) = 0.1;
  x.q(0, 1) = -0.4;
  x.p(0, 0) = 1.5;
  x.p(0, 1) = -2.0;
  auto r = hamilton_vector_field(H, *make_group("R^0"), x);
  EXPECT_EQ(r.q_dot(0, 0), 1.5);
  EXPECT_EQ(r.q_dot(0, 1), -2.0);
  EXPECT_EQ(r.p_dot(0, 0), 0.0);
  EXPECT_EQ(r.p_dot(0, 1), 0.0);
}

TEST(UnifiedDynamics, LiePoissonRigidBody) {
  Eigen::Vector3d I(1.0, 2.0, 3.0);
  BundleShape s{0, 3, 1};
  auto H = make_phase_scalar(
      [I](const auto& x) {
        using T = std::decay_t<decltype(x.alpha(0, 0))>;
        T acc(0.0);
        for (int b = 0; b < 3; ++b) acc = acc + (0.5 / I[b]) * x.alpha(0, b) * x.alpha(0, b);
        return acc;
      },
      false);
  auto G = make_group("SO3");
  std::mt19937_64 rng(23);
  for (int n = 0; n < 10; ++n) {
    PhasePoint<double> x(s);
    Eigen::Vector3d Pi = rand_vec(rng, 3);
    x.alpha.set_row(0, Vec(Pi));
    x.g = rand_vec(rng, 3, 0.5);
    auto r = hamilton_vector_field(H, *G, x);
    Eigen::Vector3d Om = Pi.cwiseQuotient(I);
    Eigen::Vector3d expect = Pi.cross(Om);
    for (int b = 0; b < 3; ++b) {
      EXPECT_NEAR(r.alpha_dot(0, b), expect[b], 1e-13);
      EXPECT_NEAR(r.g_dot[b], Om[b], 1e-15);
    }
  }
}

TEST(UnifiedDynamics, GroupIndependentHamiltonianGivesPureCoadjointFlow) {
  BundleShape s{0, 3, 1};
  auto G = make_group("SE2");
  auto Hfn = [](const auto& x) { return x.alpha(0, 0) * x.alpha(0, 2) + 0.5 * x.alpha(0, 1) * x.alpha(0, 1); };
  auto Hdep = make_phase_scalar(Hfn, true);
  auto Hind = make_phase_scalar(Hfn, false);
  PhasePoint<double> x(s);
  x.alpha.set_row(0, Vec(Eigen::Vector3d(0.3, -0.8, 1.1)));
  x.g = Vec(Eigen::Vector3d(0.2, 0.5, -0.4));
  auto a = hamilton_vector_field(Hdep, *G, x), b = hamilton_vector_field(Hind, *G, x);
  Vec coad = G->ad_star(a.g_dot, x.alpha.row_vec(0));
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(a.alpha_dot(0, c), b.alpha_dot(0, c), 1e-9);
    EXPECT_EQ(b.alpha_dot(0, c), coad[c]);
  }
}

TEST(UnifiedDynamics, StraightLinesSolveEulerLagrange) {
  auto sys = free_particle();
  std::vector<UnifiedPoint> pts;
  for (int i = 0; i < 20; ++i) {
    UnifiedPoint w(sys.shape);
    w.base.q(0, 0) = 0.5 + 1.25 * (0.1 * i);
    w.base.q(1, 0) = 1.25;
    w.p(0, 0) = 1.25;
    pts.push_back(w);
  }
  EXPECT_LE(el_residual(sys, sampled(pts, 0.1)).max_norm(), 1e-10);
}

TEST(UnifiedDynamics, RigidBodyOracleHasSmallResidual) {
  Eigen::Vector3d I(1.0, 2.0, 3.0), om0(0.4, -0.9, 0.6);
  auto sys = rigid_body_system(I);
  const double h = 1e-3;
  auto omega = rigid_body_oracle(I, om0, 0.5, h);
  std::vector<UnifiedPoint> pts;
  for (const auto& om : omega) pts.push_back(rigid_body_point(I, om));
  auto traj = sampled(pts, h);
  auto el = el_residual(sys, traj), ep = ep_residual(sys, traj);
  EXPECT_LE(el.max_norm(), 1e-6);
  for (size_t i = 0; i < el.samples.size(); ++i) EXPECT_LE((el.g_part[i] - ep.g_part[i]).norm(), 1e-10);
}

TEST(UnifiedDynamics, ResidualNeedsEnoughSamples) {
  auto sys = quartic_oscillator_system();
  std::vector<UnifiedPoint> pts(8, UnifiedPoint(sys.shape));
  try {
    el_residual(sys, sampled(pts, 0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
  }
}
