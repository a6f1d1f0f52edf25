#ifndef UNIMECH_UNIFIED_DYNAMICS_HPP
#define UNIMECH_UNIFIED_DYNAMICS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "unimech/bundle_state.hpp"
#include "unimech/calculus.hpp"
#include "unimech/errors.hpp"
#include "unimech/lie_group.hpp"

namespace unimech {

struct DynamicsConfig {
  double rank_tol = 1e-9;  // relative singular-value threshold
  double tol_c = 1e-8;     // W_c membership, scaled by 1 + |w|
};

struct UnifiedSystem {
  BundleShape shape;
  GroupPtr group;
  ScalarOnBundle L;
  ConstraintSet constraints;
  DynamicsConfig config;
  std::string name;

  const LieGroup& G() const { return *group; }
  int n() const { return static_cast<int>(constraints.size()); }
  int top() const { return shape.m + shape.d; }

  void validate() const {
    shape.validate();
    if (!group || group->dim() != shape.d)
      throw Error(ErrorCode::InvariantViolation, "group dimension does not match d");
    if (n() >= shape.m + shape.d)
      throw Error(ErrorCode::InvariantViolation, "need fewer constraints than highest-order directions");
  }
};

inline UnifiedSystem make_system(const BundleShape& shape, GroupPtr group, ScalarOnBundle L,
                                 ConstraintSet constraints = {}, std::string name = {}) {
  UnifiedSystem sys{shape, std::move(group), std::move(L), std::move(constraints), {}, std::move(name)};
  sys.validate();
  return sys;
}

struct MultiplierSolution {
  UnifiedVectorField field;
  Vec lambdas;
  Vec lambda_dot;
};

inline double membership_tol(const UnifiedSystem& sys, const UnifiedPoint& w) {
  return sys.config.tol_c * (1.0 + flatten(w).norm());
}

inline double coupling(const UnifiedPoint& w) {
  const auto& s = w.shape();
  double c = 0.0;
  for (int i = 0; i < s.k; ++i) {
    for (int A = 0; A < s.m; ++A) c += w.p(i, A) * w.base.q(i + 1, A);
    for (int b = 0; b < s.d; ++b) c += w.alpha(i, b) * w.base.xi(i, b);
  }
  return c;
}

inline double hamiltonian(const UnifiedSystem& sys, const UnifiedPoint& w) {
  return checked(coupling(w) - evaluate(sys.L, w.base), "Hamiltonian");
}

inline double omega_pairing(const UnifiedSystem& sys, const UnifiedPoint& w, const UnifiedVectorField& X1,
                            const UnifiedVectorField& X2) {
  const auto& s = sys.shape;
  double v = 0.0;
  for (int i = 0; i < s.k; ++i) {
    for (int A = 0; A < s.m; ++A) v += X1.F(i, A) * X2.G(i, A) - X2.F(i, A) * X1.G(i, A);
    for (int b = 0; b < s.d; ++b) v += X2.nu(i, b) * X1.xi1(i, b) - X1.nu(i, b) * X2.xi1(i, b);
  }
  if (s.d > 0) v += w.alpha.row_vec(0).dot(sys.G().bracket(X1.xi1.row_vec(0), X2.xi1.row_vec(0)));
  return v;
}

// Derivative data shared by the residual, the field solve and the projection.
struct PointData {
  Vec jgL, ggL;                    // jet and trivialized group gradients of L
  std::vector<Vec> jgPhi, ggPhi;
  Vec phi;
  Mat J;                           // n x (m+d), top gradients of the constraints
  Vec top_momenta;                 // (p^{k-1}, alpha_{k-1})
  Vec lambda;
  Vec jgLam, ggLam;                // gradients of L - lambda.Phi
};

inline Vec top_momenta(const UnifiedPoint& w) {
  const auto& s = w.shape();
  Vec v(s.m + s.d);
  for (int A = 0; A < s.m; ++A) v[A] = w.p(s.k - 1, A);
  for (int b = 0; b < s.d; ++b) v[s.m + b] = w.alpha(s.k - 1, b);
  return v;
}

inline void set_top_momenta(UnifiedPoint& w, const Vec& v) {
  const auto& s = w.shape();
  for (int A = 0; A < s.m; ++A) w.p(s.k - 1, A) = v[A];
  for (int b = 0; b < s.d; ++b) w.alpha(s.k - 1, b) = v[s.m + b];
}

inline Vec top_velocities(const HigherOrderState& s) {
  const auto& sh = s.shape;
  Vec v(sh.m + sh.d);
  for (int A = 0; A < sh.m; ++A) v[A] = s.q(sh.k, A);
  for (int b = 0; b < sh.d; ++b) v[sh.m + b] = s.xi(sh.k - 1, b);
  return v;
}

inline void set_top_velocities(HigherOrderState& s, const Vec& v) {
  const auto& sh = s.shape;
  for (int A = 0; A < sh.m; ++A) s.q(sh.k, A) = v[A];
  for (int b = 0; b < sh.d; ++b) s.xi(sh.k - 1, b) = v[sh.m + b];
}

inline Vec select(const Vec& v, const std::vector<int>& idx) {
  Vec out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

inline Vec least_squares(const Mat& A, const Vec& b) {
  if (A.cols() == 0) return Vec::Zero(0);
  return A.completeOrthogonalDecomposition().solve(b);
}

// Multipliers from the momentum rows: J^T lambda = grad_top L - top momenta.
inline PointData point_data(const UnifiedSystem& sys, const UnifiedPoint& w) {
  const auto& s = sys.shape;
  const auto top = top_indices(s);
  PointData pd;
  pd.jgL = jet_gradient(sys.L, w.base);
  pd.ggL = group_gradient(sys.L, sys.G(), w.base);
  const int n = sys.n();
  pd.phi = Vec(n);
  pd.J = Mat(n, s.m + s.d);
  for (int a = 0; a < n; ++a) {
    const auto& f = sys.constraints[a];
    pd.phi[a] = evaluate(f, w.base);
    pd.jgPhi.push_back(jet_gradient(f, w.base));
    pd.ggPhi.push_back(group_gradient(f, sys.G(), w.base));
    pd.J.row(a) = select(pd.jgPhi.back(), top).transpose();
  }
  pd.top_momenta = top_momenta(w);
  pd.lambda = least_squares(pd.J.transpose(), select(pd.jgL, top) - pd.top_momenta);
  pd.jgLam = pd.jgL;
  pd.ggLam = pd.ggL;
  for (int a = 0; a < n; ++a) {
    pd.jgLam -= pd.lambda[a] * pd.jgPhi[a];
    pd.ggLam -= pd.lambda[a] * pd.ggPhi[a];
  }
  return pd;
}

inline Vec wc_residual(const UnifiedSystem& sys, const UnifiedPoint& w, const PointData& pd) {
  const int t = sys.top();
  Vec r(t + sys.n());
  r.head(t) = pd.top_momenta - select(pd.jgLam, top_indices(sys.shape));
  r.tail(sys.n()) = pd.phi;
  for (int i = 0; i < r.size(); ++i) checked(r[i], "compatibility residual");
  (void)w;
  return r;
}

// Stacked compatibility residual with multipliers fitted by least squares.
inline Vec wc_residual(const UnifiedSystem& sys, const UnifiedPoint& w) {
  return wc_residual(sys, w, point_data(sys, w));
}

// Same residual with caller-supplied multipliers.
inline Vec wc_residual(const UnifiedSystem& sys, const UnifiedPoint& w, const Vec& lambda) {
  PointData pd = point_data(sys, w);
  pd.lambda = lambda;
  pd.jgLam = pd.jgL;
  for (int a = 0; a < sys.n(); ++a) pd.jgLam -= lambda[a] * pd.jgPhi[a];
  return wc_residual(sys, w, pd);
}

// Jet direction of the known part of the field: q_i -> q_{i+1}, xi^i -> xi^{i+1},
// top slots zero. The group moves along xi^0.
inline Vec known_jet_direction(const HigherOrderState& s) {
  const auto& sh = s.shape;
  Vec v = Vec::Zero(jet_dim(sh));
  for (int i = 0; i < sh.k; ++i)
    for (int A = 0; A < sh.m; ++A) v[jet_q_index(sh, i, A)] = s.q(i + 1, A);
  for (int i = 0; i + 1 < sh.k; ++i)
    for (int b = 0; b < sh.d; ++b) v[jet_xi_index(sh, i, b)] = s.xi(i + 1, b);
  return v;
}

inline Vec group_velocity(const HigherOrderState& s) {
  return s.shape.d > 0 ? s.xi.row_vec(0) : Vec::Zero(0);
}

// Every slot of the field except (F_k, xi_1^k).
inline UnifiedVectorField known_field(const UnifiedSystem& sys, const UnifiedPoint& w, const PointData& pd) {
  const auto& s = sys.shape;
  UnifiedVectorField X(s);
  for (int i = 0; i < s.k; ++i)
    for (int A = 0; A < s.m; ++A) X.F(i, A) = w.base.q(i + 1, A);
  for (int A = 0; A < s.m; ++A) X.G(0, A) = pd.jgLam[jet_q_index(s, 0, A)];
  for (int i = 1; i < s.k; ++i)
    for (int A = 0; A < s.m; ++A) X.G(i, A) = pd.jgLam[jet_q_index(s, i, A)] - w.p(i - 1, A);
  for (int i = 0; i < s.k; ++i)
    for (int b = 0; b < s.d; ++b) X.xi1(i, b) = w.base.xi(i, b);
  if (s.d > 0) {
    Vec nu0 = pd.ggLam + sys.G().ad_star(w.base.xi.row_vec(0), w.alpha.row_vec(0));
    X.nu.set_row(0, nu0);
  }
  for (int i = 0; i + 1 < s.k; ++i)
    for (int b = 0; b < s.d; ++b) X.nu(i + 1, b) = pd.jgLam[jet_xi_index(s, i, b)] - w.alpha(i, b);
  return X;
}

// Derivative of the top gradient of f along the known part of the field.
inline Vec known_top_hvp(const ScalarOnBundle& f, const LieGroup& G, const HigherOrderState& s, const Vec& vjet) {
  const auto top = top_indices(s.shape);
  return hessian_times(f, s, top, vjet) + group_derivative_of_partial(f, G, s, top, group_velocity(s));
}

inline Mat symmetric_top_hessian(const ScalarOnBundle& f, const HigherOrderState& s) {
  const auto top = top_indices(s.shape);
  const int t = static_cast<int>(top.size());
  Mat H(t, t);
  if (f.has_nested()) {
    for (int c = 0; c < t; ++c)
      for (int r = 0; r <= c; ++r) {
        auto x = seeded_state<Dual2>(s, [&](int j, double v) {
          return Dual2(Dual1(v, j == top[c] ? 1.0 : 0.0), Dual1(j == top[r] ? 1.0 : 0.0, 0.0));
        });
        H(r, c) = H(c, r) = checked(f.f2(x).d.d, "second derivative");
      }
    return H;
  }
  return top_hessian(f, s);
}

struct TangencySystem {
  Mat K;    // bordered matrix [H_lambda J^T; J 0]
  Vec rhs;
};

inline TangencySystem tangency_system(const UnifiedSystem& sys, const UnifiedPoint& w, const PointData& pd,
                                      const UnifiedVectorField& known) {
  const auto& s = sys.shape;
  const int t = sys.top(), n = sys.n();
  const Vec vjet = known_jet_direction(w.base);
  const Vec eta = group_velocity(w.base);
  Mat H = symmetric_top_hessian(sys.L, w.base);
  Vec hvp = known_top_hvp(sys.L, sys.G(), w.base, vjet);
  Vec dphi(n);
  for (int a = 0; a < n; ++a) {
    const auto& f = sys.constraints[a];
    if (pd.lambda[a] != 0.0) {
      H -= pd.lambda[a] * symmetric_top_hessian(f, w.base);
      hvp -= pd.lambda[a] * known_top_hvp(f, sys.G(), w.base, vjet);
    }
    dphi[a] = pd.jgPhi[a].dot(vjet) + (s.d > 0 ? pd.ggPhi[a].dot(eta) : 0.0);
  }
  TangencySystem ts;
  ts.K = Mat::Zero(t + n, t + n);
  ts.K.topLeftCorner(t, t) = H;
  ts.K.topRightCorner(t, n) = pd.J.transpose();
  ts.K.bottomLeftCorner(n, t) = pd.J;
  Vec top_rates(t);
  for (int A = 0; A < s.m; ++A) top_rates[A] = known.G(s.k - 1, A);
  for (int b = 0; b < s.d; ++b) top_rates[s.m + b] = known.nu(s.k - 1, b);
  ts.rhs = Vec(t + n);
  ts.rhs.head(t) = top_rates - hvp;
  ts.rhs.tail(n) = -dphi;
  return ts;
}

inline bool numerically_singular(const Mat& K, double rank_tol) {
  Eigen::JacobiSVD<Mat> svd(K);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return false;
  return !(sv[sv.size() - 1] > rank_tol * sv[0]);
}

inline int numeric_rank(const Mat& K, double rank_tol) {
  if (K.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(K);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > rank_tol * sv[0] && sv[i] > 0.0) ++r;
  return r;
}

// Field solve without a membership check; used at integrator stages.
inline MultiplierSolution solve_field(const UnifiedSystem& sys, const UnifiedPoint& w) {
  const auto& s = sys.shape;
  const int t = sys.top(), n = sys.n();
  PointData pd = point_data(sys, w);
  MultiplierSolution sol;
  sol.field = known_field(sys, w, pd);
  TangencySystem ts = tangency_system(sys, w, pd, sol.field);
  if (numerically_singular(ts.K, sys.config.rank_tol)) {
    if (n == 0) throw Error(ErrorCode::SingularHessian, "highest-order Hessian is singular");
    throw Error(ErrorCode::DegenerateBorderedMatrix, "bordered matrix is singular");
  }
  Vec z = ts.K.partialPivLu().solve(ts.rhs);
  for (int i = 0; i < z.size(); ++i) checked(z[i], "tangency solve");
  for (int A = 0; A < s.m; ++A) sol.field.F(s.k, A) = z[A];
  for (int b = 0; b < s.d; ++b) sol.field.xi1(s.k, b) = z[s.m + b];
  sol.lambdas = pd.lambda;
  sol.lambda_dot = -z.tail(n);
  (void)t;
  return sol;
}

inline UnifiedVectorField solve_dynamics(const UnifiedSystem& sys, const UnifiedPoint& w) {
  if (sys.n() != 0) throw Error(ErrorCode::InvariantViolation, "constrained system: use constrained_solve");
  return solve_field(sys, w).field;
}

inline MultiplierSolution constrained_solve(const UnifiedSystem& sys, const UnifiedPoint& w) {
  PointData pd = point_data(sys, w);
  if (wc_residual(sys, w, pd).norm() > membership_tol(sys, w))
    throw Error(ErrorCode::InfeasiblePoint, "point is not on the compatibility submanifold");
  return solve_field(sys, w);
}

// Bordered matrix [H_lambda J^T; J 0] in the order (q_k, xi^{k-1}, lambda).
inline Mat bordered_matrix(const UnifiedSystem& sys, const UnifiedPoint& w) {
  PointData pd = point_data(sys, w);
  UnifiedVectorField known = known_field(sys, w, pd);
  return tangency_system(sys, w, pd, known).K;
}

inline Vec field_tangent(const UnifiedSystem& sys, const UnifiedPoint& w) {
  return tangent_from_field(sys.shape, solve_field(sys, w).field);
}

// Differential of H applied to a field-shaped direction.
inline double dH_apply(const UnifiedSystem& sys, const UnifiedPoint& w, const UnifiedVectorField& Y) {
  const auto& s = sys.shape;
  Vec jg = jet_gradient(sys.L, w.base);
  Vec gg = group_gradient(sys.L, sys.G(), w.base);
  double v = 0.0;
  for (int i = 0; i <= s.k; ++i)
    for (int A = 0; A < s.m; ++A) {
      double dHdq = -jg[jet_q_index(s, i, A)] + (i >= 1 ? w.p(i - 1, A) : 0.0);
      v += dHdq * Y.F(i, A);
    }
  for (int i = 0; i < s.k; ++i)
    for (int A = 0; A < s.m; ++A) v += w.base.q(i + 1, A) * Y.G(i, A);
  for (int b = 0; b < s.d; ++b) v += -gg[b] * Y.xi1(0, b);
  for (int i = 0; i < s.k; ++i)
    for (int b = 0; b < s.d; ++b) {
      double dHdxi = -jg[jet_xi_index(s, i, b)] + w.alpha(i, b);
      v += dHdxi * Y.xi1(i + 1, b);
      v += w.base.xi(i, b) * Y.nu(i, b);
    }
  return v;
}

}  // namespace unimech

#endif  // UNIMECH_UNIFIED_DYNAMICS_HPP
