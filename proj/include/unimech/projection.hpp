#ifndef UNIMECH_PROJECTION_HPP
#define UNIMECH_PROJECTION_HPP

#include <functional>

#include "unimech/unified_dynamics.hpp"

namespace unimech {

struct ProjectionConfig {
  double tol = -1.0;  // absolute; negative means the system's membership tolerance
  int max_iter = 20;
};

// Drives wc_residual to zero: min-norm Newton on the constraints over the
// top velocities, then the top momenta are reset from the Legendre rows.
inline UnifiedPoint project_wc(const UnifiedSystem& sys, const UnifiedPoint& w, ProjectionConfig cfg = {}) {
  const double tol = cfg.tol > 0 ? cfg.tol : membership_tol(sys, w);
  PointData pd = point_data(sys, w);
  if (wc_residual(sys, w, pd).norm() <= tol) return w;
  UnifiedPoint cur = w;
  const auto top = top_indices(sys.shape);
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (sys.n() > 0 && pd.phi.norm() > 0.0) {
      Vec step = least_squares(pd.J, -pd.phi);
      set_top_velocities(cur.base, top_velocities(cur.base) + step);
      pd = point_data(sys, cur);
    }
    Vec grad_top = select(pd.jgL, top);
    set_top_momenta(cur, grad_top - pd.J.transpose() * pd.lambda);
    pd = point_data(sys, cur);
    double r = wc_residual(sys, cur, pd).norm();
    if (!std::isfinite(r)) throw Error(ErrorCode::NonFinite, "non-finite residual during projection");
    if (r <= tol) return cur;
  }
  throw Error(ErrorCode::ProjectionFailed, "projection onto the compatibility submanifold did not converge");
}

// Inverse Legendre map: with all momenta fixed, solve for the top velocities
// and multipliers so that the point lies on W_c.
inline UnifiedPoint complete_velocities(const UnifiedSystem& sys, const UnifiedPoint& w, int max_iter = 50) {
  const int t = sys.top(), n = sys.n();
  UnifiedPoint cur = w;
  const double tol = membership_tol(sys, w);
  PointData pd = point_data(sys, cur);
  Vec lambda = pd.lambda;
  for (int it = 0; it < max_iter; ++it) {
    Vec r = wc_residual(sys, cur, lambda);
    if (!std::isfinite(r.norm())) throw Error(ErrorCode::NonFinite, "non-finite residual in velocity completion");
    if (r.norm() <= 0.01 * tol) return cur;
    pd = point_data(sys, cur);
    Mat H = symmetric_top_hessian(sys.L, cur.base);
    for (int a = 0; a < n; ++a) H -= lambda[a] * symmetric_top_hessian(sys.constraints[a], cur.base);
    Mat K = Mat::Zero(t + n, t + n);
    K.topLeftCorner(t, t) = -H;
    K.topRightCorner(t, n) = pd.J.transpose();
    K.bottomLeftCorner(n, t) = pd.J;
    Vec dz = least_squares(K, -r);
    set_top_velocities(cur.base, top_velocities(cur.base) + dz.head(t));
    lambda += dz.tail(n);
  }
  if (wc_residual(sys, cur, lambda).norm() <= tol) return cur;
  throw Error(ErrorCode::ProjectionFailed, "velocity completion did not converge");
}

// Min-norm Newton on an arbitrary vector constraint over flat tangent
// directions (group block left-trivialized), FD Jacobian.
inline bool project_generic(const LieGroup& G, const std::function<Vec(const UnifiedPoint&)>& c, UnifiedPoint& w,
                            double tol, int max_iter = 30) {
  const int N = flat_dim(w.shape());
  for (int it = 0; it <= max_iter; ++it) {
    Vec r = c(w);
    if (!std::isfinite(r.norm())) return false;
    if (r.norm() <= tol) return true;
    if (it == max_iter) break;
    Mat Jc(r.size(), N);
    Vec flat = flatten(w);
    for (int j = 0; j < N; ++j) {
      const double h = second_order_step(flat[j]);
      Vec e = Vec::Zero(N);
      e[j] = 1.0;
      Jc.col(j) = (c(retract(G, w, e, h)) - c(retract(G, w, e, -h))) / (2.0 * h);
    }
    Vec step = least_squares(Jc, -r);
    w = retract(G, w, step, 1.0);
  }
  return false;
}

// FD Jacobian of a vector function over flat tangent directions.
inline Mat tangent_jacobian(const LieGroup& G, const std::function<Vec(const UnifiedPoint&)>& c,
                            const UnifiedPoint& w) {
  const int N = flat_dim(w.shape());
  Vec flat = flatten(w);
  Mat Jc;
  for (int j = 0; j < N; ++j) {
    const double h = second_order_step(flat[j]);
    Vec e = Vec::Zero(N);
    e[j] = 1.0;
    Vec col = (c(retract(G, w, e, h)) - c(retract(G, w, e, -h))) / (2.0 * h);
    if (j == 0) Jc = Mat(col.size(), N);
    Jc.col(j) = col;
  }
  return Jc;
}

}  // namespace unimech

#endif  // UNIMECH_PROJECTION_HPP
