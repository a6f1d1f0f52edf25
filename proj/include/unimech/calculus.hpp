#ifndef UNIMECH_CALCULUS_HPP
#define UNIMECH_CALCULUS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "unimech/bundle_state.hpp"
#include "unimech/dual.hpp"
#include "unimech/errors.hpp"
#include "unimech/lie_group.hpp"

namespace unimech {

// A scalar function of (q_0..q_k, g, xi^0..xi^{k-1}). The jet coordinates may
// carry dual numbers; g is always a plain chart vector.
struct ScalarOnBundle {
  std::function<double(const JetState<double>&)> f0;
  std::function<Dual1(const JetState<Dual1>&)> f1;
  std::function<Dual2(const JetState<Dual2>&)> f2;  // empty: second derivatives by FD of f1
  bool group_dependent = true;
  std::string label;

  double operator()(const HigherOrderState& s) const { return f0(s); }
  bool has_nested() const { return static_cast<bool>(f2); }
};

// Wraps a generic callable `f(const JetState<T>&) -> T`. Nested duals are used
// when the callable accepts them.
template <class F>
ScalarOnBundle make_scalar(F f, bool group_dependent = true, std::string label = {}) {
  ScalarOnBundle s;
  s.f0 = [f](const JetState<double>& x) { return static_cast<double>(f(x)); };
  s.f1 = [f](const JetState<Dual1>& x) { return Dual1(f(x)); };
  if constexpr (std::is_invocable_r_v<Dual2, F, const JetState<Dual2>&>) {
    s.f2 = [f](const JetState<Dual2>& x) { return Dual2(f(x)); };
  }
  s.group_dependent = group_dependent;
  s.label = std::move(label);
  return s;
}

using ConstraintSet = std::vector<ScalarOnBundle>;

// Jet coordinates are indexed as [q_0..q_k rows | xi^0..xi^{k-1} rows].
inline int jet_dim(const BundleShape& s) { return (s.k + 1) * s.m + s.k * s.d; }
inline int jet_q_index(const BundleShape& s, int i, int A) { return i * s.m + A; }
inline int jet_xi_index(const BundleShape& s, int i, int b) { return (s.k + 1) * s.m + i * s.d + b; }

// Indices of the highest-order directions (q_k, xi^{k-1}).
inline std::vector<int> top_indices(const BundleShape& s) {
  std::vector<int> idx;
  for (int A = 0; A < s.m; ++A) idx.push_back(jet_q_index(s, s.k, A));
  for (int b = 0; b < s.d; ++b) idx.push_back(jet_xi_index(s, s.k - 1, b));
  return idx;
}

inline Vec jet_vector(const HigherOrderState& s) {
  Vec v(jet_dim(s.shape));
  int i = 0;
  for (double x : s.q.data) v[i++] = x;
  for (double x : s.xi.data) v[i++] = x;
  return v;
}

inline HigherOrderState with_jet(const HigherOrderState& s, const Vec& v) {
  HigherOrderState out = s;
  int i = 0;
  for (double& x : out.q.data) x = v[i++];
  for (double& x : out.xi.data) x = v[i++];
  return out;
}

// Builds a jet state of scalar T whose coordinate j equals make(j, value_j).
template <class T, class Make>
JetState<T> seeded_state(const HigherOrderState& s, Make make) {
  JetState<T> out;
  out.shape = s.shape;
  out.g = s.g;
  out.q = Grid<T>(s.q.rows, s.q.cols, T(0.0));
  out.xi = Grid<T>(s.xi.rows, s.xi.cols, T(0.0));
  int j = 0;
  for (size_t i = 0; i < s.q.data.size(); ++i, ++j) out.q.data[i] = make(j, s.q.data[i]);
  for (size_t i = 0; i < s.xi.data.size(); ++i, ++j) out.xi.data[i] = make(j, s.xi.data[i]);
  return out;
}

inline double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, std::string("non-finite value in ") + what);
  return v;
}

inline double first_order_step(double x) { return std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(x)); }
inline double second_order_step(double x) { return std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(x)); }

inline double evaluate(const ScalarOnBundle& f, const HigherOrderState& s) { return checked(f.f0(s), "function value"); }

// Derivative of f along a jet direction (group fixed).
inline double jet_directional(const ScalarOnBundle& f, const HigherOrderState& s, const Vec& dir) {
  auto x = seeded_state<Dual1>(s, [&](int j, double v) { return Dual1(v, dir[j]); });
  return checked(f.f1(x).d, "directional derivative");
}

// Full jet gradient: one dual evaluation per coordinate.
inline Vec jet_gradient(const ScalarOnBundle& f, const HigherOrderState& s) {
  const int n = jet_dim(s.shape);
  Vec out(n);
  for (int k = 0; k < n; ++k) {
    auto x = seeded_state<Dual1>(s, [&](int j, double v) { return Dual1(v, j == k ? 1.0 : 0.0); });
    out[k] = checked(f.f1(x).d, "gradient");
  }
  return out;
}

inline Vec partial_gradient(const ScalarOnBundle& f, const HigherOrderState& s, const std::vector<int>& idx) {
  Vec out(idx.size());
  for (size_t r = 0; r < idx.size(); ++r) {
    auto x = seeded_state<Dual1>(s, [&](int j, double v) { return Dual1(v, j == idx[r] ? 1.0 : 0.0); });
    out[r] = checked(f.f1(x).d, "gradient");
  }
  return out;
}

// Left-trivialized derivative in the group slot (zero for group-independent f).
inline Vec group_gradient(const ScalarOnBundle& f, const LieGroup& G, const HigherOrderState& s) {
  if (G.dim() == 0 || !f.group_dependent) return Vec::Zero(G.dim());
  return trivialized_group_derivative(
      [&](const Vec& g) {
        HigherOrderState t = s;
        t.g = g;
        return f.f0(t);
      },
      G, s.g);
}

struct BundleGradient {
  Grid<double> dq;   // (k+1) x m
  Grid<double> dxi;  // k x d
  Vec dg_triv;
};

inline BundleGradient gradient(const ScalarOnBundle& f, const LieGroup& G, const HigherOrderState& s) {
  const auto& sh = s.shape;
  Vec j = jet_gradient(f, s);
  BundleGradient out{Grid<double>(sh.k + 1, sh.m), Grid<double>(sh.k, sh.d), group_gradient(f, G, s)};
  for (int i = 0; i <= sh.k; ++i)
    for (int A = 0; A < sh.m; ++A) out.dq(i, A) = j[jet_q_index(sh, i, A)];
  for (int i = 0; i < sh.k; ++i)
    for (int b = 0; b < sh.d; ++b) out.dxi(i, b) = j[jet_xi_index(sh, i, b)];
  return out;
}

// Rows idx_r, direction dir: entry r is d/de [df/dx_{idx_r}](x + e dir).
inline Vec hessian_times(const ScalarOnBundle& f, const HigherOrderState& s, const std::vector<int>& idx,
                         const Vec& dir) {
  Vec out(idx.size());
  if (f.has_nested()) {
    for (size_t r = 0; r < idx.size(); ++r) {
      auto x = seeded_state<Dual2>(s, [&](int j, double v) {
        return Dual2(Dual1(v, dir[j]), Dual1(j == idx[r] ? 1.0 : 0.0, 0.0));
      });
      out[r] = checked(f.f2(x).d.d, "second derivative");
    }
    return out;
  }
  Vec base = jet_vector(s);
  for (size_t r = 0; r < idx.size(); ++r) {
    const int j = idx[r];
    const double h = second_order_step(base[j]);
    Vec xp = base, xm = base;
    xp[j] += h;
    xm[j] -= h;
    double dp = jet_directional(f, with_jet(s, xp), dir);
    double dm = jet_directional(f, with_jet(s, xm), dir);
    out[r] = (dp - dm) / (2.0 * h);
  }
  return out;
}

// Raw (unsymmetrized) Hessian block over rows idx_r, columns idx_c.
inline Mat hessian_block(const ScalarOnBundle& f, const HigherOrderState& s, const std::vector<int>& rows,
                         const std::vector<int>& cols) {
  const int n = jet_dim(s.shape);
  Mat H(rows.size(), cols.size());
  for (size_t c = 0; c < cols.size(); ++c) {
    Vec e = Vec::Zero(n);
    e[cols[c]] = 1.0;
    H.col(c) = hessian_times(f, s, rows, e);
  }
  return H;
}

struct HighestOrderHessian {
  Mat Hqq;
  Mat Hqx;
  Mat Hxx;

  Mat full() const {
    const int m = Hqq.rows(), d = Hxx.rows();
    Mat H(m + d, m + d);
    H.topLeftCorner(m, m) = Hqq;
    H.topRightCorner(m, d) = Hqx;
    H.bottomLeftCorner(d, m) = Hqx.transpose();
    H.bottomRightCorner(d, d) = Hxx;
    return H;
  }
};

inline Mat top_hessian(const ScalarOnBundle& f, const HigherOrderState& s) {
  auto idx = top_indices(s.shape);
  Mat H = hessian_block(f, s, idx, idx);
  return 0.5 * (H + H.transpose());
}

inline HighestOrderHessian highest_hessian(const ScalarOnBundle& f, const HigherOrderState& s) {
  const int m = s.shape.m, d = s.shape.d;
  Mat H = top_hessian(f, s);
  return {H.topLeftCorner(m, m), H.topRightCorner(m, d), H.bottomRightCorner(d, d)};
}

// d/dt of the top gradient as g moves along g exp(t eta), central differences.
inline Vec group_derivative_of_partial(const ScalarOnBundle& f, const LieGroup& G, const HigherOrderState& s,
                                       const std::vector<int>& idx, const Vec& eta) {
  if (G.dim() == 0 || !f.group_dependent || eta.norm() == 0.0) return Vec::Zero(idx.size());
  const double h = group_fd_step(s.g) / std::max(1.0, eta.norm());
  HigherOrderState sp = s, sm = s;
  sp.g = G.compose(s.g, G.exp(h * eta));
  sm.g = G.compose(s.g, G.exp(-h * eta));
  return (partial_gradient(f, sp, idx) - partial_gradient(f, sm, idx)) / (2.0 * h);
}

}  // namespace unimech

#endif  // UNIMECH_CALCULUS_HPP
