#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "unimech/calculus.hpp"

using namespace unimech;

namespace {

HigherOrderState random_state(const BundleShape& s, std::mt19937_64& rng, double a = 1.0) {
  std::uniform_real_distribution<double> U(-a, a);
  HigherOrderState x(s);
  for (auto& v : x.q.data) v = U(rng);
  for (auto& v : x.xi.data) v = U(rng);
  for (auto& v : x.g) v = U(rng);
  return x;
}

// Smooth polynomial-trigonometric test function with coefficients c.
struct PolyFn {
  std::vector<double> c;
  template <class S>
  auto operator()(const S& s) const {
    using T = typename S::scalar_type;
    using std::sin;
    T acc(0.0);
    size_t j = 0;
    for (const auto& v : s.q.data) {
      acc = acc + c[j % c.size()] * v * v * v + c[(j + 1) % c.size()] * v;
      j += 2;
    }
    for (const auto& v : s.xi.data) acc = acc + c[j++ % c.size()] * sin(v) * v;
    if (!s.q.data.empty() && !s.xi.data.empty()) acc = acc + c[j % c.size()] * s.q.data.front() * s.xi.data.back();
    return acc;
  }
};

Vec central_gradient(const ScalarOnBundle& f, const HigherOrderState& s) {
  Vec x = jet_vector(s);
  Vec g(x.size());
  for (int j = 0; j < x.size(); ++j) {
    const double h = second_order_step(x[j]);
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (f(with_jet(s, xp)) - f(with_jet(s, xm))) / (2 * h);
  }
  return g;
}

}  // namespace

TEST(Calculus, KineticGradient) {
  BundleShape s{1, 3, 1};
  auto f = make_scalar([](const auto& x) { return 0.5 * (x.xi(0, 0) * x.xi(0, 0) + x.xi(0, 1) * x.xi(0, 1) + x.xi(0, 2) * x.xi(0, 2)); },
                       false);
  std::mt19937_64 rng(2);
  HigherOrderState x = random_state(s, rng);
  auto G = make_group("SO3");
  BundleGradient g = gradient(f, *G, x);
  for (int b = 0; b < 3; ++b) EXPECT_EQ(g.dxi(0, b), x.xi(0, b));
  for (double v : g.dq.data) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(g.dg_triv.norm(), 0.0);
}

TEST(Calculus, ReducedVehicleThirdComponent) {
  const double J1 = 1.3, J2 = 0.7;
  auto l = make_scalar(
      [=](const auto& x) {
        return 0.5 * (x.xi(0, 0) * x.xi(0, 0) + x.xi(0, 1) * x.xi(0, 1)) + (0.5 * (J1 + J2)) * x.xi(0, 2) * x.xi(0, 2) +
               J2 * x.xi(0, 2) * x.q(1, 0) + (0.5 * J2) * x.q(1, 0) * x.q(1, 0);
      },
      false);
  BundleShape s{1, 3, 1};
  std::mt19937_64 rng(5);
  HigherOrderState x = random_state(s, rng);
  Vec g = jet_gradient(l, x);
  EXPECT_NEAR(g[jet_xi_index(s, 0, 2)], (J1 + J2) * x.xi(0, 2) + J2 * x.q(1, 0), 1e-15);
}

TEST(Calculus, DualGradientMatchesCentralDifferences) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-2, 2);
  const BundleShape shapes[] = {{1, 0, 1}, {2, 3, 2}, {1, 1, 3}, {0, 3, 2}};
  for (int n = 0; n < 100; ++n) {
    PolyFn p{{U(rng), U(rng), U(rng), U(rng), U(rng)}};
    auto f = make_scalar(p, false);
    HigherOrderState x = random_state(shapes[n % 4], rng);
    Vec a = jet_gradient(f, x), b = central_gradient(f, x);
    EXPECT_LE((a - b).norm(), 1e-6 * (1 + a.norm()));
  }
}

TEST(Calculus, GradientIsLinear) {
  std::mt19937_64 rng(23);
  BundleShape s{2, 3, 2};
  auto f = make_scalar(PolyFn{{1.0, -0.5, 2.0}}, false);
  auto h = make_scalar(PolyFn{{0.3, 0.7, -1.1, 0.2}}, false);
  const double a = 2.5, b = -0.75;
  auto fh = make_scalar([&](const auto& x) { return a * PolyFn{{1.0, -0.5, 2.0}}(x) + b * PolyFn{{0.3, 0.7, -1.1, 0.2}}(x); },
                        false);
  for (int n = 0; n < 10; ++n) {
    HigherOrderState x = random_state(s, rng);
    Vec lhs = jet_gradient(fh, x), rhs = a * jet_gradient(f, x) + b * jet_gradient(h, x);
    EXPECT_LE((lhs - rhs).norm(), 1e-13 * (1 + lhs.norm()));
  }
}

TEST(Calculus, GroupGradientMatchesDirectionalDifferences) {
  auto G = make_group("SE2");
  BundleShape s{0, 3, 1};
  auto f = make_scalar([](const auto& x) { return x.xi(0, 0) * x.xi(0, 0) + 0.0 * x.xi(0, 1); }, true);
  // Group-dependent part goes through f0 only.
  f.f0 = [](const HigherOrderState& x) { return std::sin(x.g[0]) + x.g[1] * x.g[2] + x.xi(0, 0) * x.xi(0, 0); };
  std::mt19937_64 rng(29);
  for (int n = 0; n < 10; ++n) {
    HigherOrderState x = random_state(s, rng);
    Vec gg = group_gradient(f, *G, x);
    for (int b = 0; b < 3; ++b) {
      Vec e = Vec::Zero(3);
      e[b] = 1.0;
      const double h = 1e-5;
      HigherOrderState xp = x, xm = x;
      xp.g = G->compose(x.g, G->exp(h * e));
      xm.g = G->compose(x.g, G->exp(-h * e));
      EXPECT_NEAR(gg[b], (f(xp) - f(xm)) / (2 * h), 1e-7);
    }
  }
}

TEST(Calculus, GroupIndependentHasZeroGroupGradient) {
  auto G = make_group("SO3");
  BundleShape s{0, 3, 1};
  auto f = make_scalar([](const auto& x) { return x.xi(0, 0) * x.xi(0, 1); }, false);
  std::mt19937_64 rng(1);
  EXPECT_EQ(group_gradient(f, *G, random_state(s, rng)).norm(), 0.0);
}

TEST(Calculus, ConstantMassMatrixHessian) {
  BundleShape s{2, 0, 2};
  Mat M(2, 2);
  M << 2.0, 0.5, 0.5, 3.0;
  auto f = make_scalar(
      [M](const auto& x) {
        return 0.5 * (M(0, 0) * x.q(2, 0) * x.q(2, 0) + 2 * M(0, 1) * x.q(2, 0) * x.q(2, 1) + M(1, 1) * x.q(2, 1) * x.q(2, 1));
      },
      false);
  std::mt19937_64 rng(4);
  HighestOrderHessian H = highest_hessian(f, random_state(s, rng));
  EXPECT_EQ((H.Hqq - M).norm(), 0.0);
}

TEST(Calculus, MixedHessianEntry) {
  BundleShape s{1, 1, 1};
  auto f = make_scalar([](const auto& x) { return x.q(1, 0) * x.xi(0, 0); }, false);
  std::mt19937_64 rng(6);
  HighestOrderHessian H = highest_hessian(f, random_state(s, rng));
  EXPECT_EQ(H.Hqx(0, 0), 1.0);
  EXPECT_EQ(H.Hqq(0, 0), 0.0);
  EXPECT_EQ(H.Hxx(0, 0), 0.0);
}

TEST(Calculus, RawHessianIsSymmetric) {
  std::mt19937_64 rng(31);
  BundleShape s{2, 3, 2};
  auto f = make_scalar(PolyFn{{0.4, -1.2, 0.9, 1.7, -0.3}}, false);
  auto top = top_indices(s);
  for (int n = 0; n < 10; ++n) {
    HigherOrderState x = random_state(s, rng);
    Mat H = hessian_block(f, x, top, top);
    EXPECT_LE((H - H.transpose()).norm(), 1e-9 * (1 + H.norm()));
  }
}

TEST(Calculus, FiniteDifferenceFallbackAgreesWithNestedDuals) {
  std::mt19937_64 rng(37);
  BundleShape s{1, 3, 2};
  auto nested = make_scalar(PolyFn{{0.4, -1.2, 0.9, 1.7, -0.3}}, false);
  auto fd = nested;
  fd.f2 = nullptr;
  ASSERT_FALSE(fd.has_nested());
  HigherOrderState x = random_state(s, rng);
  Mat a = top_hessian(nested, x), b = top_hessian(fd, x);
  EXPECT_LE((a - b).norm(), 1e-6 * (1 + a.norm()));
}

TEST(Calculus, NonFiniteValuesAreReported) {
  BundleShape s{1, 0, 1};
  auto f = make_scalar([](const auto& x) { return 1.0 / x.q(0, 0); }, false);
  HigherOrderState x(s);
  try {
    jet_gradient(f, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
  EXPECT_THROW(evaluate(f, x), Error);
}
