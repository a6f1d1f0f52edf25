#include <gtest/gtest.h>

#include <random>

#include "unimech/lie_group.hpp"

using namespace unimech;

namespace {

std::vector<GroupPtr> shipped_groups() {
  return {make_group("R^3"), make_group("S1"), make_group("SO3"), make_group("SE2"), make_group("product(SE2,S1)"),
          make_group("product(SO3,R^2)")};
}

Vec random_vec(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

Eigen::Matrix3d taylor_exp(const Eigen::Matrix3d& A, int terms) {
  Eigen::Matrix3d out = Eigen::Matrix3d::Identity(), term = Eigen::Matrix3d::Identity();
  for (int n = 1; n < terms; ++n) {
    term = term * A / n;
    out += term;
  }
  return out;
}

}  // namespace

TEST(LieCore, ExpOfZeroIsIdentity) {
  auto G = make_group("SE2");
  EXPECT_EQ(G->exp(Vec::Zero(3)), Vec::Zero(3));
}

TEST(LieCore, CircleExpIsIdentityOnCoordinates) {
  auto G = make_group("S1");
  EXPECT_DOUBLE_EQ(G->exp(Vec::Constant(1, M_PI / 2))[0], M_PI / 2);
}

TEST(LieCore, SO3ExpMatchesTaylorSeries) {
  for (double th : {0.1, 0.7, 1.3}) {
    Vec x(3);
    x << 0, 0, th;
    Eigen::Matrix3d R = SO3Group::rotation(x);
    Eigen::Matrix3d T = taylor_exp(SO3Group::hat(x), 12);
    // Twelve terms leave a truncation of th^12/12!; the bound below is that remainder plus roundoff.
    double bound = std::pow(th, 12) / 479001600.0 * 2 + 1e-12;
    EXPECT_LE((R - T).cwiseAbs().maxCoeff(), bound);
    Eigen::Matrix3d Rz;
    Rz << std::cos(th), -std::sin(th), 0, std::sin(th), std::cos(th), 0, 0, 0, 1;
    EXPECT_LE((R - Rz).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(LieCore, SE2StructureConstants) {
  auto G = make_group("SE2");
  // Indices are zero-based: C(c, a, b) is C^{c+1}_{a+1 b+1}.
  EXPECT_EQ(G->C(1, 2, 0), -1.0);
  EXPECT_EQ(G->C(0, 1, 2), -1.0);
  EXPECT_EQ(G->C(1, 0, 2), 1.0);
  EXPECT_EQ(G->C(0, 2, 1), 1.0);
  int nonzero = 0;
  for (double c : G->structure_constants()) nonzero += c != 0.0;
  EXPECT_EQ(nonzero, 4);
}

TEST(LieCore, SE2BracketMatchesMatrixCommutator) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    Vec x = random_vec(rng, 3, 2.0), y = random_vec(rng, 3, 2.0);
    Eigen::Matrix3d X = SE2Group::algebra_matrix(x), Y = SE2Group::algebra_matrix(y);
    Eigen::Matrix3d comm = X * Y - Y * X;
    EXPECT_LE((SE2Group::algebra_matrix(make_group("SE2")->bracket(x, y)) - comm).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(LieCore, SE2ExpMatchesMatrixExponential) {
  std::mt19937_64 rng(4);
  SE2Group G;
  for (int i = 0; i < 50; ++i) {
    Vec x = random_vec(rng, 3, 1.5);
    Eigen::Matrix3d E = taylor_exp(SE2Group::algebra_matrix(x), 30);
    EXPECT_LE((SE2Group::matrix(G.exp(x)) - E).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LieCore, SE2ComposeMatchesMatrixProduct) {
  std::mt19937_64 rng(5);
  SE2Group G;
  for (int i = 0; i < 50; ++i) {
    Vec a = random_vec(rng, 3, 3.0), b = random_vec(rng, 3, 3.0);
    EXPECT_LE((SE2Group::matrix(G.compose(a, b)) - SE2Group::matrix(a) * SE2Group::matrix(b)).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(LieCore, AdStarZeroDirectionIsIdentityMap) {
  for (auto& G : shipped_groups()) {
    Vec alpha = Vec::LinSpaced(G->dim(), 1.0, 2.0);
    EXPECT_LE((G->ad_star(Vec::Zero(G->dim()), alpha)).norm(), 0.0);
  }
}

TEST(LieCore, SE2AdStarBasisExample) {
  auto G = make_group("SE2");
  Vec e1 = Vec::Unit(3, 0), e2s = Vec::Unit(3, 1);
  // Only C^2_{13} = 1 contributes: (ad*_{e1} e^2)_3 = 1.
  Vec expected(3);
  expected << 0, 0, 1;
  EXPECT_LE((G->ad_star(e1, e2s) - expected).norm(), 1e-15);
  // The cross-product identification agrees on this pair.
  Eigen::Vector3d cross = Eigen::Vector3d(e1).cross(Eigen::Vector3d(e2s));
  EXPECT_LE((G->ad_star(e1, e2s) - Vec(cross)).norm(), 1e-15);
}

TEST(LieCore, AdStarDuality) {
  std::mt19937_64 rng(7);
  for (auto& G : shipped_groups()) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      Vec x = random_vec(rng, G->dim(), 2.0), a = random_vec(rng, G->dim(), 2.0), y = random_vec(rng, G->dim(), 2.0);
      worst = std::max(worst, std::abs(G->ad_star(x, a).dot(y) - a.dot(G->bracket(x, y))));
    }
    EXPECT_LE(worst, 1e-11) << G->name();
  }
}

TEST(LieCore, BracketAntisymmetricAndJacobi) {
  for (auto& G : shipped_groups()) {
    const int d = G->dim();
    double anti = 0.0, jac = 0.0;
    for (int c = 0; c < d; ++c)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          anti = std::max(anti, std::abs(G->C(c, a, b) + G->C(c, b, a)));
          for (int e = 0; e < d; ++e) {
            // sum_f C^f_{ab} C^e_{fc} + cyclic
            double s = 0.0;
            for (int f = 0; f < d; ++f)
              s += G->C(f, a, b) * G->C(e, f, c) + G->C(f, b, c) * G->C(e, f, a) + G->C(f, c, a) * G->C(e, f, b);
            jac = std::max(jac, std::abs(s));
          }
        }
    EXPECT_EQ(anti, 0.0) << G->name();
    EXPECT_LE(jac, 1e-12) << G->name();
  }
}

TEST(LieCore, ExpTimesExpNegIsIdentity) {
  std::mt19937_64 rng(11);
  for (auto& G : shipped_groups()) {
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
      Vec x = random_vec(rng, G->dim(), 1.0);
      x *= (10.0 * std::uniform_real_distribution<double>(0, 1)(rng)) / std::max(1e-12, x.norm());
      Vec e = G->compose(G->exp(x), G->exp(-x));
      worst = std::max(worst, G->log(e).norm());
    }
    EXPECT_LE(worst, 1e-12) << G->name();
  }
}

TEST(LieCore, GroupLaws) {
  std::mt19937_64 rng(13);
  for (auto& G : shipped_groups()) {
    for (int i = 0; i < 200; ++i) {
      Vec a = G->exp(random_vec(rng, G->dim(), 2.0)), b = G->exp(random_vec(rng, G->dim(), 2.0)),
          c = G->exp(random_vec(rng, G->dim(), 2.0));
      EXPECT_LE(G->log(G->compose(a, G->inverse(a))).norm(), 1e-12) << G->name();
      Vec l = G->compose(G->compose(a, b), c), r = G->compose(a, G->compose(b, c));
      EXPECT_LE(G->log(G->compose(G->inverse(l), r)).norm(), 1e-10) << G->name();
    }
  }
}

TEST(LieCore, LogInvertsExpNearIdentity) {
  std::mt19937_64 rng(17);
  for (auto& G : shipped_groups()) {
    for (int i = 0; i < 100; ++i) {
      Vec x = random_vec(rng, G->dim(), 1.0);
      EXPECT_LE((G->log(G->exp(x)) - x).norm(), 1e-12) << G->name();
    }
  }
}

TEST(LieCore, ProductIsBlockwise) {
  auto P = make_group("product(SE2,S1)");
  auto A = make_group("SE2");
  auto B = make_group("S1");
  std::mt19937_64 rng(19);
  for (int i = 0; i < 50; ++i) {
    Vec x = random_vec(rng, 4, 2.0), y = random_vec(rng, 4, 2.0), al = random_vec(rng, 4, 2.0);
    Vec e = P->exp(x);
    EXPECT_LE((e.head(3) - A->exp(x.head(3))).norm(), 0.0);
    EXPECT_LE((e.tail(1) - B->exp(x.tail(1))).norm(), 0.0);
    Vec br = P->bracket(x, y);
    EXPECT_LE((br.head(3) - A->bracket(x.head(3), y.head(3))).norm(), 1e-15);
    EXPECT_EQ(br[3], 0.0);
    Vec ad = P->ad_star(x, al);
    EXPECT_LE((ad.head(3) - A->ad_star(x.head(3), al.head(3))).norm(), 1e-15);
  }
}

TEST(LieCore, TrivializedDerivativeOfConstantIsZero) {
  auto G = make_group("SE2");
  Vec g(3);
  g << 0.3, -1.0, 2.0;
  Vec d = trivialized_group_derivative([](const Vec&) { return 4.2; }, *G, g);
  EXPECT_EQ(d.norm(), 0.0);
}

TEST(LieCore, TrivializedDerivativeOfHeading) {
  auto G = make_group("SE2");
  std::mt19937_64 rng(23);
  for (int i = 0; i < 20; ++i) {
    Vec g = random_vec(rng, 3, 3.0);
    // theta(g exp(t e_b)) = theta + t delta_{b3}, so the covector is (0, 0, 1).
    Vec d = trivialized_group_derivative([](const Vec& h) { return h[2]; }, *G, g);
    EXPECT_LE((d - Vec::Unit(3, 2)).norm(), 1e-9);
  }
}

TEST(LieCore, TrivializedDerivativeOfLeftInvariantFunctionVanishes) {
  auto G = make_group("SO3");
  Vec h(3);
  h << 0.2, -0.4, 0.9;
  // Left-invariant functions are constant on the group; this one is written through the group operations.
  auto f = [&](const Vec& g) { return G->log(G->compose(G->inverse(g), g)).squaredNorm(); };
  EXPECT_LE(trivialized_group_derivative(f, *G, h).norm(), 1e-9);
}

TEST(LieCore, DexpInvSeries) {
  auto G = make_group("SO3");
  Vec u(3), v(3);
  u << 0.01, -0.02, 0.015;
  v << 0.3, 0.1, -0.2;
  // d/dt log(exp(u) exp(t v)) at t=0 is dexp^{-1}_{-u}(v).
  const double h = 1e-6;
  Vec fd = (G->log(G->compose(G->exp(u), G->exp(h * v))) - G->log(G->compose(G->exp(u), G->exp(-h * v)))) / (2 * h);
  EXPECT_LE((fd - G->dexp_inv(-u, v)).norm(), 1e-7);
}

TEST(LieCore, GroupIdentifiers) {
  EXPECT_EQ(make_group("R^4")->dim(), 4);
  EXPECT_EQ(make_group("product(SE2, S1)")->dim(), 4);
  EXPECT_EQ(make_group("product(product(S1,S1),SO3)")->dim(), 5);
  try {
    make_group("SL3");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
}

TEST(LieCore, SE2WrapsOnlyOnOutput) {
  SE2Group G;
  Vec g(3);
  g << 0, 0, 3.0;
  Vec step(3);
  step << 0, 0, 0.5;
  Vec h = G.compose(g, G.exp(step));
  EXPECT_NEAR(h[2], 3.5, 1e-15);
  EXPECT_NEAR(G.wrap_for_output(h)[2], 3.5 - 2 * M_PI, 1e-15);
}
