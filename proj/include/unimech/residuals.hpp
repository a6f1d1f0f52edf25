#ifndef UNIMECH_RESIDUALS_HPP
#define UNIMECH_RESIDUALS_HPP

#include <algorithm>
#include <functional>
#include <vector>

#include "unimech/unified_dynamics.hpp"

namespace unimech {

// A point of T*(T^{k-1}(M x G)): q_0..q_{k-1}, p^0..p^{k-1}, g,
// xi^0..xi^{k-2}, alpha_0..alpha_{k-1}.
template <class T>
struct PhasePoint {
  BundleShape shape;
  Grid<T> q, p;
  Vec g;
  Grid<T> xi, alpha;

  PhasePoint() = default;
  explicit PhasePoint(const BundleShape& s)
      : shape(s), q(s.k, s.m), p(s.k, s.m), g(Vec::Zero(s.d)), xi(s.k - 1, s.d), alpha(s.k, s.d) {}
};

struct PhaseScalar {
  std::function<double(const PhasePoint<double>&)> f0;
  std::function<Dual1(const PhasePoint<Dual1>&)> f1;
  bool group_dependent = true;
};

template <class F>
PhaseScalar make_phase_scalar(F f, bool group_dependent = true) {
  return {[f](const PhasePoint<double>& x) { return static_cast<double>(f(x)); },
          [f](const PhasePoint<Dual1>& x) { return Dual1(f(x)); }, group_dependent};
}

struct HamiltonRhs {
  Grid<double> q_dot, p_dot;
  Vec g_dot;  // left-trivialized: g^{-1} dg/dt
  Grid<double> xi_dot, alpha_dot;
};

inline HamiltonRhs hamilton_vector_field(const PhaseScalar& H, const LieGroup& G, const PhasePoint<double>& x) {
  const auto& s = x.shape;
  // Coordinates in the order q, p, xi, alpha.
  std::vector<Grid<double> const*> blocks{&x.q, &x.p, &x.xi, &x.alpha};
  std::vector<Grid<double>> grads{Grid<double>(s.k, s.m), Grid<double>(s.k, s.m), Grid<double>(s.k - 1, s.d),
                                  Grid<double>(s.k, s.d)};
  auto lift = [&](int blk, size_t idx) {
    PhasePoint<Dual1> y;
    y.shape = s;
    y.g = x.g;
    Grid<Dual1>* out[4] = {&y.q, &y.p, &y.xi, &y.alpha};
    for (int b = 0; b < 4; ++b) {
      *out[b] = Grid<Dual1>(blocks[b]->rows, blocks[b]->cols);
      for (size_t i = 0; i < blocks[b]->data.size(); ++i)
        out[b]->data[i] = Dual1(blocks[b]->data[i], (b == blk && i == idx) ? 1.0 : 0.0);
    }
    return y;
  };
  for (int b = 0; b < 4; ++b)
    for (size_t i = 0; i < blocks[b]->data.size(); ++i) grads[b].data[i] = checked(H.f1(lift(b, i)).d, "Hamiltonian gradient");
  Vec gg = Vec::Zero(s.d);
  if (s.d > 0 && H.group_dependent) {
    gg = trivialized_group_derivative(
        [&](const Vec& g) {
          PhasePoint<double> y = x;
          y.g = g;
          return H.f0(y);
        },
        G, x.g);
  }
  HamiltonRhs r;
  r.q_dot = grads[1];
  r.p_dot = grads[0];
  for (double& v : r.p_dot.data) v = -v;
  r.xi_dot = Grid<double>(s.k - 1, s.d);
  r.alpha_dot = Grid<double>(s.k, s.d);
  r.g_dot = Vec::Zero(s.d);
  if (s.d > 0) {
    r.g_dot = grads[3].row_vec(0);
    r.alpha_dot.set_row(0, Vec(-gg + G.ad_star(r.g_dot, x.alpha.row_vec(0))));
  }
  for (int i = 0; i + 1 < s.k; ++i)
    for (int b = 0; b < s.d; ++b) {
      r.xi_dot(i, b) = grads[3](i + 1, b);
      r.alpha_dot(i + 1, b) = -grads[2](i, b);
    }
  return r;
}

struct ElResidual {
  std::vector<int> samples;
  std::vector<Vec> m_part;
  std::vector<Vec> g_part;

  double max_norm() const {
    double v = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
      v = std::max(v, m_part[i].size() ? m_part[i].lpNorm<Eigen::Infinity>() : 0.0);
      v = std::max(v, g_part[i].size() ? g_part[i].lpNorm<Eigen::Infinity>() : 0.0);
    }
    return v;
  }
};

namespace detail {

inline Vec derivative_at(const std::vector<Vec>& hist, int j, int order, double h) {
  auto w = centered_weights(order);
  Vec acc = Vec::Zero(hist[j].size());
  for (int o = -2; o <= 2; ++o)
    if (w[o + 2] != 0.0) acc += w[o + 2] * hist[j + o];
  return acc / std::pow(h, order);
}

inline ElResidual variational_residual(const UnifiedSystem& sys, const Trajectory& traj, bool group_term) {
  const auto& s = sys.shape;
  const int n = static_cast<int>(traj.size());
  if (n < 4 * s.k + 1) throw Error(ErrorCode::InsufficientSamples, "residual needs at least 4k+1 samples");
  const double h = traj.step();
  std::vector<std::vector<Vec>> a(s.k + 1), b(s.k);
  std::vector<Vec> gg, xi0;
  for (const auto& w : traj.points) {
    PointData pd = point_data(sys, w);
    for (int i = 0; i <= s.k; ++i) {
      Vec v(s.m);
      for (int A = 0; A < s.m; ++A) v[A] = pd.jgLam[jet_q_index(s, i, A)];
      a[i].push_back(v);
    }
    for (int i = 0; i < s.k; ++i) {
      Vec v(s.d);
      for (int c = 0; c < s.d; ++c) v[c] = pd.jgLam[jet_xi_index(s, i, c)];
      b[i].push_back(v);
    }
    gg.push_back(pd.ggLam);
    xi0.push_back(group_velocity(w.base));
  }
  const int radius = s.k <= 2 ? 1 : 2;
  ElResidual out;
  for (int j = radius; j + radius < n; ++j) {
    Vec rm = Vec::Zero(s.m);
    for (int i = 0; i <= s.k; ++i) rm += ((i % 2) ? -1.0 : 1.0) * derivative_at(a[i], j, i, h);
    Vec rg = Vec::Zero(s.d);
    if (s.d > 0) {
      Vec mom = Vec::Zero(s.d);
      for (int i = 0; i < s.k; ++i) {
        const double sg = (i % 2) ? -1.0 : 1.0;
        rg += sg * derivative_at(b[i], j, i + 1, h);
        mom += sg * derivative_at(b[i], j, i, h);
      }
      rg -= sys.G().ad_star(xi0[j], mom);
      if (group_term) rg -= gg[j];
    }
    out.samples.push_back(j);
    out.m_part.push_back(rm);
    out.g_part.push_back(rg);
  }
  return out;
}

}  // namespace detail

// Euler-Lagrange residuals (M part and trivialized group part) of a sampled
// trajectory, with the multipliers recomputed from the momenta at each sample.
inline ElResidual el_residual(const UnifiedSystem& sys, const Trajectory& traj) {
  return detail::variational_residual(sys, traj, true);
}

// Euler-Poincare residual: as above without the group-gradient term; meant for
// a reduced Lagrangian.
inline ElResidual ep_residual(const UnifiedSystem& sys, const Trajectory& traj) {
  return detail::variational_residual(sys, traj, false);
}

}  // namespace unimech

#endif  // UNIMECH_RESIDUALS_HPP
