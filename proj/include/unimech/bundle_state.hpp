#ifndef UNIMECH_BUNDLE_STATE_HPP
#define UNIMECH_BUNDLE_STATE_HPP

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "unimech/errors.hpp"
#include "unimech/lie_group.hpp"

namespace unimech {

struct BundleShape {
  int m = 0;
  int d = 0;
  int k = 1;

  void validate() const {
    if (m < 0 || d < 0 || m + d < 1 || k < 1)
      throw Error(ErrorCode::InvariantViolation, "bundle shape needs m, d >= 0, m + d >= 1, k >= 1");
  }
  int top() const { return m + d; }
  bool operator==(const BundleShape&) const = default;
};

// Row-major rows x cols storage.
template <class T>
struct Grid {
  int rows = 0;
  int cols = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(int r, int c, const T& fill = T(0.0)) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  T& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  const T& operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  std::vector<T> row(int r) const { return {data.begin() + r * cols, data.begin() + (r + 1) * cols}; }
  void set_row(int r, const std::vector<T>& v) {
    for (int c = 0; c < cols; ++c) (*this)(r, c) = v[c];
  }
  Vec row_vec(int r) const
    requires std::is_same_v<T, double>
  {
    Vec v(cols);
    for (int c = 0; c < cols; ++c) v[c] = (*this)(r, c);
    return v;
  }
  void set_row(int r, const Vec& v)
    requires std::is_same_v<T, double>
  {
    for (int c = 0; c < cols; ++c) (*this)(r, c) = v[c];
  }
  bool operator==(const Grid&) const = default;
};

// A point of T^kM x G x k g: q is (k+1) x m, xi is k x d, g a chart vector.
// The group coordinate never carries dual numbers.
template <class T>
struct JetState {
  using scalar_type = T;
  BundleShape shape;
  Grid<T> q;
  Vec g;
  Grid<T> xi;

  JetState() = default;
  explicit JetState(const BundleShape& s)
      : shape(s), q(s.k + 1, s.m), g(Vec::Zero(s.d)), xi(s.k, s.d) {}
};

using HigherOrderState = JetState<double>;

struct UnifiedPoint {
  HigherOrderState base;
  Grid<double> p;      // k x m
  Grid<double> alpha;  // k x d

  UnifiedPoint() = default;
  explicit UnifiedPoint(const BundleShape& s) : base(s), p(s.k, s.m), alpha(s.k, s.d) {}
  const BundleShape& shape() const { return base.shape; }
};

struct UnifiedVectorField {
  Grid<double> F;    // (k+1) x m
  Grid<double> G;    // k x m
  Grid<double> xi1;  // (k+1) x d
  Grid<double> nu;   // k x d

  UnifiedVectorField() = default;
  explicit UnifiedVectorField(const BundleShape& s) : F(s.k + 1, s.m), G(s.k, s.m), xi1(s.k + 1, s.d), nu(s.k, s.d) {}
};

struct Trajectory {
  std::vector<double> times;
  std::vector<UnifiedPoint> points;
  bool uniform = true;

  size_t size() const { return points.size(); }
  double step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

// Flat layout [q_0..q_k | p_0..p_{k-1} | g-chart | xi^0..xi^{k-1} | alpha_0..alpha_{k-1}].
inline int flat_dim(const BundleShape& s) { return (s.k + 1) * s.m + s.k * s.m + s.d + s.k * s.d + s.k * s.d; }

struct FlatOffsets {
  int q, p, g, xi, alpha, total;
};

inline FlatOffsets flat_offsets(const BundleShape& s) {
  FlatOffsets o{};
  o.q = 0;
  o.p = (s.k + 1) * s.m;
  o.g = o.p + s.k * s.m;
  o.xi = o.g + s.d;
  o.alpha = o.xi + s.k * s.d;
  o.total = o.alpha + s.k * s.d;
  return o;
}

inline Vec flatten(const UnifiedPoint& w) {
  const auto& s = w.shape();
  Vec out(flat_dim(s));
  int i = 0;
  for (double v : w.base.q.data) out[i++] = v;
  for (double v : w.p.data) out[i++] = v;
  for (int j = 0; j < s.d; ++j) out[i++] = w.base.g[j];
  for (double v : w.base.xi.data) out[i++] = v;
  for (double v : w.alpha.data) out[i++] = v;
  return out;
}

inline UnifiedPoint unflatten(const BundleShape& s, const Vec& flat) {
  if (flat.size() != flat_dim(s)) throw Error(ErrorCode::InvariantViolation, "flat vector has wrong length");
  UnifiedPoint w(s);
  int i = 0;
  for (double& v : w.base.q.data) v = flat[i++];
  for (double& v : w.p.data) v = flat[i++];
  for (int j = 0; j < s.d; ++j) w.base.g[j] = flat[i++];
  for (double& v : w.base.xi.data) v = flat[i++];
  for (double& v : w.alpha.data) v = flat[i++];
  return w;
}

// Tangent vectors use the flat layout with the group block left-trivialized:
// moving along v means g -> g exp(eps v_g), everything else additive.
inline UnifiedPoint retract(const LieGroup& G, const UnifiedPoint& w, const Vec& v, double eps) {
  const auto& s = w.shape();
  const auto o = flat_offsets(s);
  Vec flat = flatten(w);
  Vec moved = flat + eps * v;
  UnifiedPoint out = unflatten(s, moved);
  if (s.d > 0) out.base.g = G.compose(w.base.g, G.exp(eps * v.segment(o.g, s.d)));
  return out;
}

inline Vec difference(const LieGroup& G, const UnifiedPoint& a, const UnifiedPoint& b) {
  const auto& s = a.shape();
  const auto o = flat_offsets(s);
  Vec diff = flatten(a) - flatten(b);
  if (s.d > 0) diff.segment(o.g, s.d) = G.log(G.compose(G.inverse(b.base.g), a.base.g));
  return diff;
}

inline UnifiedVectorField field_from_tangent(const BundleShape& s, const Vec& v) {
  const auto o = flat_offsets(s);
  UnifiedVectorField X(s);
  for (int i = 0; i < (s.k + 1) * s.m; ++i) X.F.data[i] = v[o.q + i];
  for (int i = 0; i < s.k * s.m; ++i) X.G.data[i] = v[o.p + i];
  for (int b = 0; b < s.d; ++b) X.xi1(0, b) = v[o.g + b];
  for (int i = 0; i < s.k; ++i)
    for (int b = 0; b < s.d; ++b) X.xi1(i + 1, b) = v[o.xi + i * s.d + b];
  for (int i = 0; i < s.k * s.d; ++i) X.nu.data[i] = v[o.alpha + i];
  return X;
}

inline Vec tangent_from_field(const BundleShape& s, const UnifiedVectorField& X) {
  const auto o = flat_offsets(s);
  Vec v(o.total);
  for (int i = 0; i < (s.k + 1) * s.m; ++i) v[o.q + i] = X.F.data[i];
  for (int i = 0; i < s.k * s.m; ++i) v[o.p + i] = X.G.data[i];
  for (int b = 0; b < s.d; ++b) v[o.g + b] = X.xi1(0, b);
  for (int i = 0; i < s.k; ++i)
    for (int b = 0; b < s.d; ++b) v[o.xi + i * s.d + b] = X.xi1(i + 1, b);
  for (int i = 0; i < s.k * s.d; ++i) v[o.alpha + i] = X.nu.data[i];
  return v;
}

inline bool all_finite(const UnifiedPoint& w) {
  for (double v : flatten(w))
    if (!std::isfinite(v)) return false;
  return true;
}

// Finite-difference weights for the derivative of `order` at offset 0 from
// sample offsets `offs` (in units of h), exact on polynomials of degree
// offs.size() - 1.
inline std::vector<double> fd_weights(const std::vector<int>& offs, int order) {
  const int n = static_cast<int>(offs.size());
  Mat V(n, n);
  Vec rhs = Vec::Zero(n);
  double fact = 1.0;
  for (int p = 0; p < n; ++p) {
    if (p > 0) fact *= p;
    for (int j = 0; j < n; ++j) V(p, j) = std::pow(static_cast<double>(offs[j]), p) / fact;
  }
  rhs[order] = 1.0;
  Vec w = V.fullPivLu().solve(rhs);
  return {w.data(), w.data() + n};
}

// Second-order centered stencils of minimal width, used on derivative histories.
inline std::vector<double> centered_weights(int order) {
  switch (order) {
    case 0: return {0.0, 0.0, 1.0, 0.0, 0.0};
    case 1: return {0.0, -0.5, 0.0, 0.5, 0.0};
    case 2: return {0.0, 1.0, -2.0, 1.0, 0.0};
    case 3: return {-0.5, 1.0, 0.0, -1.0, 0.5};
    case 4: return {1.0, -4.0, 6.0, -4.0, 1.0};
    default: throw Error(ErrorCode::InvariantViolation, "derivative order above 4 not supported");
  }
}

// Applies 5-wide weights centered at sample i.
inline Vec apply_centered(const std::vector<double>& w, int order, const std::vector<Vec>& samples, int i, double h) {
  Vec acc = Vec::Zero(samples[i].size());
  for (int j = -2; j <= 2; ++j)
    if (w[j + 2] != 0.0) acc += w[j + 2] * samples[i + j];
  return acc / std::pow(h, order);
}

struct CurveSample {
  double t;
  Vec q0;
  Vec g;
  Vec xi0;
};

// Fills q_1..q_k and xi^1..xi^{k-1} from sampled q_0 and xi^0 histories using
// five-point stencils (fewer when the curve is shorter). Interior samples get
// centered stencils; the window is shifted inward near the ends.
inline std::vector<HigherOrderState> prolong(const std::vector<CurveSample>& curve, const BundleShape& s) {
  const int n = static_cast<int>(curve.size());
  if (n < 2 * s.k + 1) throw Error(ErrorCode::InsufficientSamples, "prolong needs at least 2k+1 samples");
  const int width = std::min(n, 5);
  const int half = width / 2;
  const double h = curve[1].t - curve[0].t;
  std::vector<HigherOrderState> out;
  for (int i = 0; i < n; ++i) {
    HigherOrderState st(s);
    st.g = curve[i].g;
    const int c = std::min(std::max(i, half), n - 1 - (width - 1 - half));
    std::vector<int> offs;
    for (int j = c - half; j < c - half + width; ++j) offs.push_back(j - i);
    for (int A = 0; A < s.m; ++A) st.q(0, A) = curve[i].q0[A];
    for (int b = 0; b < s.d; ++b) st.xi(0, b) = curve[i].xi0[b];
    for (int order = 1; order <= s.k; ++order) {
      auto w = fd_weights(offs, order);
      const double scale = std::pow(h, order);
      for (int A = 0; A < s.m; ++A) {
        double acc = 0.0;
        for (int j = 0; j < width; ++j) acc += w[j] * curve[i + offs[j]].q0[A];
        st.q(order, A) = acc / scale;
      }
      if (order < s.k) {
        for (int b = 0; b < s.d; ++b) {
          double acc = 0.0;
          for (int j = 0; j < width; ++j) acc += w[j] * curve[i + offs[j]].xi0[b];
          st.xi(order, b) = acc / scale;
        }
      }
    }
    out.push_back(st);
  }
  return out;
}

}  // namespace unimech

#endif  // UNIMECH_BUNDLE_STATE_HPP
