#ifndef UNIMECH_INTEGRATOR_HPP
#define UNIMECH_INTEGRATOR_HPP

#include <optional>
#include <utility>
#include <vector>

#include "unimech/projection.hpp"

namespace unimech {

enum class Scheme { RK4, LieEuler };

struct IntegratorConfig {
  double step = 1e-3;
  int n_steps = 1000;
  double projection_tol = 1e-10;  // absolute bound on |wc_residual|
  int max_projection_iters = 20;
  Scheme scheme = Scheme::RK4;
};

struct InvariantRecord {
  double t = 0.0;
  double H = 0.0;
  double wc_residual = 0.0;
  std::optional<double> symplectic_defect;
};

struct InvariantLog {
  std::vector<InvariantRecord> records;

  double max_H_drift() const {
    double v = 0.0;
    for (const auto& r : records) v = std::max(v, std::abs(r.H - records.front().H));
    return v;
  }
  double max_wc_residual() const {
    double v = 0.0;
    for (const auto& r : records) v = std::max(v, r.wc_residual);
    return v;
  }
};

namespace detail {

// Moves the non-group coordinates by `dflat` and the group by g exp(u).
inline UnifiedPoint advance(const LieGroup& G, const UnifiedPoint& w, const Vec& dflat, const Vec& u) {
  const auto& s = w.shape();
  const auto o = flat_offsets(s);
  Vec flat = flatten(w) + dflat;
  flat.segment(o.g, s.d) = w.base.g;
  UnifiedPoint out = unflatten(s, flat);
  if (s.d > 0) out.base.g = G.compose(w.base.g, G.exp(u));
  return out;
}

inline Vec group_block(const BundleShape& s, const Vec& v) { return v.segment(flat_offsets(s).g, s.d); }

}  // namespace detail

// One step; RK4 couples classical RK4 on the flat coordinates with
// Munthe-Kaas stages for the group. With g = g_n exp(U) and g^{-1} dg/dt = xi,
// dU/dt = dexp^{-1}_{-U}(xi).
inline UnifiedPoint rk_step(const UnifiedSystem& sys, const UnifiedPoint& w, double h, Scheme scheme) {
  using detail::advance;
  using detail::group_block;
  const auto& G = sys.G();
  const auto& s = sys.shape;
  Vec k1 = field_tangent(sys, w);
  Vec u1 = group_block(s, k1);
  if (scheme == Scheme::LieEuler) return advance(G, w, h * k1, h * u1);
  Vec k2 = field_tangent(sys, advance(G, w, 0.5 * h * k1, 0.5 * h * u1));
  Vec u2 = G.dexp_inv(-0.5 * h * u1, group_block(s, k2));
  Vec k3 = field_tangent(sys, advance(G, w, 0.5 * h * k2, 0.5 * h * u2));
  Vec u3 = G.dexp_inv(-0.5 * h * u2, group_block(s, k3));
  Vec k4 = field_tangent(sys, advance(G, w, h * k3, h * u3));
  Vec u4 = G.dexp_inv(-h * u3, group_block(s, k4));
  return advance(G, w, (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), (h / 6.0) * (u1 + 2.0 * u2 + 2.0 * u3 + u4));
}

inline InvariantRecord invariant_record(const UnifiedSystem& sys, const UnifiedPoint& w, double t) {
  return {t, hamiltonian(sys, w), wc_residual(sys, w).norm(), std::nullopt};
}

inline std::pair<Trajectory, InvariantLog> integrate(const UnifiedSystem& sys, const UnifiedPoint& w0,
                                                     const IntegratorConfig& cfg) {
  if (!(cfg.step > 0.0) || !(cfg.projection_tol > 0.0) || cfg.n_steps < 0)
    throw Error(ErrorCode::ConfigError, "integrator needs step > 0, projection_tol > 0, n_steps >= 0");
  ProjectionConfig pc{cfg.projection_tol, cfg.max_projection_iters};
  UnifiedPoint w = project_wc(sys, w0, pc);
  Trajectory traj;
  InvariantLog log;
  traj.times.push_back(0.0);
  traj.points.push_back(w);
  log.records.push_back(invariant_record(sys, w, 0.0));
  for (int i = 1; i <= cfg.n_steps; ++i) {
    w = rk_step(sys, w, cfg.step, cfg.scheme);
    w = project_wc(sys, w, pc);
    if (!all_finite(w)) throw Error(ErrorCode::NonFinite, "integration produced non-finite state");
    const double t = i * cfg.step;
    traj.times.push_back(t);
    traj.points.push_back(w);
    log.records.push_back(invariant_record(sys, w, t));
  }
  return {traj, log};
}

// Final point only; skips the invariant log.
inline UnifiedPoint flow(const UnifiedSystem& sys, const UnifiedPoint& w0, const IntegratorConfig& cfg) {
  ProjectionConfig pc{cfg.projection_tol, cfg.max_projection_iters};
  UnifiedPoint w = project_wc(sys, w0, pc);
  for (int i = 0; i < cfg.n_steps; ++i) w = project_wc(sys, rk_step(sys, w, cfg.step, cfg.scheme), pc);
  return w;
}

// Projects flat tangent directions onto the tangent space of W_c at w.
inline Vec project_to_wc_tangent(const UnifiedSystem& sys, const UnifiedPoint& w, const Vec& u) {
  Mat Jc = tangent_jacobian(sys.G(), [&](const UnifiedPoint& x) { return wc_residual(sys, x); }, w);
  return u - least_squares(Jc, Jc * u);
}

struct DefectConfig {
  double fd_eps = 1e-3;
};

// max over direction pairs of |Omega(Ju, Jv) - Omega(u, v)|, with J the flow
// Jacobian over cfg.n_steps steps by five-point differences.
inline double symplectic_defect(const UnifiedSystem& sys, const UnifiedPoint& w0, const IntegratorConfig& cfg,
                                const std::vector<Vec>& directions, DefectConfig dc = {}) {
  const auto& G = sys.G();
  const auto& s = sys.shape;
  ProjectionConfig pc{cfg.projection_tol, cfg.max_projection_iters};
  UnifiedPoint base = project_wc(sys, w0, pc);
  UnifiedPoint wT = flow(sys, base, cfg);
  std::vector<Vec> us, Jus;
  for (const auto& d : directions) {
    Vec u = project_to_wc_tangent(sys, base, d);
    const double e = dc.fd_eps;
    auto image = [&](double c) { return difference(G, flow(sys, project_wc(sys, retract(G, base, u, c * e), pc), cfg), wT); };
    Vec Ju = (image(-2.0) - 8.0 * image(-1.0) + 8.0 * image(1.0) - image(2.0)) / (12.0 * e);
    us.push_back(u);
    Jus.push_back(Ju);
  }
  double defect = 0.0;
  for (size_t i = 0; i < us.size(); ++i)
    for (size_t j = i + 1; j < us.size(); ++j) {
      double before = omega_pairing(sys, base, field_from_tangent(s, us[i]), field_from_tangent(s, us[j]));
      double after = omega_pairing(sys, wT, field_from_tangent(s, Jus[i]), field_from_tangent(s, Jus[j]));
      defect = std::max(defect, std::abs(after - before));
    }
  return defect;
}

}  // namespace unimech

#endif  // UNIMECH_INTEGRATOR_HPP
