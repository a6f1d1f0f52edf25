#ifndef UNIMECH_OPTIMAL_CONTROL_HPP
#define UNIMECH_OPTIMAL_CONTROL_HPP

#include <functional>
#include <limits>
#include <vector>

#include "unimech/integrator.hpp"

namespace unimech {

// First-order controlled system on TM x g. The callables are generic over the
// scalar type:
//   L(q, qd, xi) -> T
//   sections(q)  -> m + d sections (X_1..X_m, Xi_1..Xi_d), actuated first
//   cost(q, qd, xi, u) -> T
template <class BaseL, class Sections, class Cost>
struct ControlledSystem {
  int m = 0;
  int d = 0;
  int r = 0;
  GroupPtr group;
  BaseL L;
  Sections sections;
  Cost cost;
};

template <class BaseL, class Sections, class Cost>
ControlledSystem<BaseL, Sections, Cost> make_controlled_system(int m, int d, int r, GroupPtr group, BaseL L,
                                                               Sections sections, Cost cost) {
  return {m, d, r, std::move(group), std::move(L), std::move(sections), std::move(cost)};
}

template <class T>
struct ForceResiduals {
  std::vector<T> E;    // (d/dt dL/dqd - dL/dq, d/dt dL/dxi - ad*_xi dL/dxi)
  std::vector<T> F;    // r actuated contractions
  std::vector<T> Phi;  // m + d - r unactuated contractions
};

// Controlled Euler-Lagrange covector E along the jet (q, qd, qdd, xi, xid);
// time derivatives of the momenta come from one nested-dual pass per slot.
template <class T, class BaseL>
std::vector<T> controlled_el_covector(const BaseL& L, const LieGroup& G, int m, int d, const std::vector<T>& q,
                                      const std::vector<T>& qd, const std::vector<T>& qdd, const std::vector<T>& xi,
                                      const std::vector<T>& xid) {
  using D = Dual<T>;
  using DD = Dual<D>;
  const int n = 2 * m + d;
  std::vector<T> z, zdot;
  z.insert(z.end(), q.begin(), q.end());
  z.insert(z.end(), qd.begin(), qd.end());
  z.insert(z.end(), xi.begin(), xi.end());
  zdot.insert(zdot.end(), qd.begin(), qd.end());
  zdot.insert(zdot.end(), qdd.begin(), qdd.end());
  zdot.insert(zdot.end(), xid.begin(), xid.end());
  std::vector<T> grad(n, T(0.0)), rate(n, T(0.0));
  for (int j = 0; j < n; ++j) {
    std::vector<DD> a(m), b(m), c(d);
    for (int i = 0; i < n; ++i) {
      DD v(D(z[i], zdot[i]), D(T(i == j ? 1.0 : 0.0), T(0.0)));
      if (i < m) a[i] = v;
      else if (i < 2 * m) b[i - m] = v;
      else c[i - 2 * m] = v;
    }
    DD val = L(a, b, c);
    grad[j] = val.d.v;
    rate[j] = val.d.d;
  }
  std::vector<T> E(m + d, T(0.0));
  for (int A = 0; A < m; ++A) E[A] = rate[m + A] - grad[A];
  if (d > 0) {
    std::vector<T> mu(grad.begin() + 2 * m, grad.end());
    std::vector<T> ad = G.ad_star(xi, mu);
    for (int b = 0; b < d; ++b) E[m + b] = rate[2 * m + b] - ad[b];
  }
  return E;
}

template <class T, class BaseL, class Sections, class Cost>
ForceResiduals<T> force_residuals(const ControlledSystem<BaseL, Sections, Cost>& cs, const std::vector<T>& q,
                                  const std::vector<T>& qd, const std::vector<T>& qdd, const std::vector<T>& xi,
                                  const std::vector<T>& xid) {
  ForceResiduals<T> out;
  out.E = controlled_el_covector(cs.L, *cs.group, cs.m, cs.d, q, qd, qdd, xi, xid);
  std::vector<std::vector<T>> B = cs.sections(q);
  const int n = cs.m + cs.d;
  for (int s = 0; s < n; ++s) {
    T acc(0.0);
    for (int j = 0; j < n; ++j) acc = acc + out.E[j] * B[s][j];
    (s < cs.r ? out.F : out.Phi).push_back(acc);
  }
  for (const auto& v : out.E) checked(value_of(v), "force residual");
  return out;
}

// Reads (q, qd, qdd, xi, xid) out of a k = 2 jet.
template <class T>
void split_jet(const JetState<T>& s, std::vector<T>& q, std::vector<T>& qd, std::vector<T>& qdd,
               std::vector<T>& xi, std::vector<T>& xid) {
  q = s.q.row(0);
  qd = s.q.row(1);
  qdd = s.q.row(2);
  xi = s.xi.row(0);
  xid = s.xi.row(1);
}

struct ReducedOcp {
  BundleShape shape;
  GroupPtr group;
  ScalarOnBundle Ltilde;
  ConstraintSet Phis;
  int r = 0;
  std::function<Vec(const HigherOrderState&)> controls;  // u_a = F_a
  std::function<Vec(const HigherOrderState&)> forces;    // E
  std::function<Mat(const Vec&)> sections;               // columns B_1..B_{m+d} at q
};

inline UnifiedSystem ocp_system(const ReducedOcp& ocp, std::string name = "reduced-ocp") {
  return make_system(ocp.shape, ocp.group, ocp.Ltilde, ocp.Phis, std::move(name));
}

template <class BaseL, class Sections, class Cost>
ReducedOcp build_reduced_ocp(const ControlledSystem<BaseL, Sections, Cost>& cs) {
  if (cs.r < 1 || cs.r >= cs.m + cs.d)
    throw Error(ErrorCode::InvariantViolation, "controlled system must be underactuated with 1 <= r < m + d");
  if (!cs.group || cs.group->dim() != cs.d) throw Error(ErrorCode::InvariantViolation, "group dimension mismatch");
  ReducedOcp ocp;
  ocp.shape = BundleShape{cs.m, cs.d, 2};
  ocp.group = cs.group;
  ocp.r = cs.r;
  auto ltilde = [cs](const auto& s) {
    using T = typename std::decay_t<decltype(s)>::scalar_type;
    std::vector<T> q, qd, qdd, xi, xid;
    split_jet(s, q, qd, qdd, xi, xid);
    auto fr = force_residuals(cs, q, qd, qdd, xi, xid);
    return T(cs.cost(q, qd, xi, fr.F));
  };
  ocp.Ltilde = make_scalar(ltilde, false, "Ltilde");
  for (int a = 0; a < cs.m + cs.d - cs.r; ++a) {
    auto phi = [cs, a](const auto& s) {
      using T = typename std::decay_t<decltype(s)>::scalar_type;
      std::vector<T> q, qd, qdd, xi, xid;
      split_jet(s, q, qd, qdd, xi, xid);
      return force_residuals(cs, q, qd, qdd, xi, xid).Phi[a];
    };
    ocp.Phis.push_back(make_scalar(phi, false, "Phi" + std::to_string(a + 1)));
  }
  ocp.controls = [cs](const HigherOrderState& s) {
    std::vector<double> q, qd, qdd, xi, xid;
    split_jet(s, q, qd, qdd, xi, xid);
    auto F = force_residuals(cs, q, qd, qdd, xi, xid).F;
    return Vec(Eigen::Map<Vec>(F.data(), F.size()));
  };
  ocp.forces = [cs](const HigherOrderState& s) {
    std::vector<double> q, qd, qdd, xi, xid;
    split_jet(s, q, qd, qdd, xi, xid);
    auto E = force_residuals(cs, q, qd, qdd, xi, xid).E;
    return Vec(Eigen::Map<Vec>(E.data(), E.size()));
  };
  ocp.sections = [cs](const Vec& qv) {
    std::vector<double> q(qv.data(), qv.data() + qv.size());
    auto B = cs.sections(q);
    const int n = cs.m + cs.d;
    Mat S(n, n);
    for (int a = 0; a < n; ++a)
      for (int j = 0; j < n; ++j) S(j, a) = B[a][j];
    return S;
  };
  return ocp;
}

// Unactuated completion by orthogonal complement of the actuated columns.
inline Mat orthogonal_completion(const Mat& actuated) {
  const int n = actuated.rows(), r = actuated.cols();
  Eigen::HouseholderQR<Mat> qr(actuated);
  Mat Q = qr.householderQ() * Mat::Identity(n, n);
  return Q.rightCols(n - r);
}

struct BoundaryConditions {
  Vec q0, qd0, xi0, g0;
  Vec qT, qdT, xiT, gT;
  double T = 1.0;
};

struct BvpConfig {
  int n_steps = 100;
  double tol = 1e-8;
  int max_iter = 50;
  int max_halvings = 8;
  double projection_tol = 1e-12;
  bool central_jacobian = true;  // forward differences with sqrt(eps) steps otherwise
  bool damped_fallback = true;   // Levenberg-Marquardt steps when halving fails
};

struct BvpResult {
  Trajectory traj;
  std::vector<Vec> controls;
  double cost = 0.0;
  int iterations = 0;
  double residual = 0.0;
  Vec z;
};

// Initial point on W_c from boundary data and momentum seeds
// z = (p^0, p^1, alpha_0, alpha_1).
inline UnifiedPoint bvp_initial_point(const UnifiedSystem& sys, const BoundaryConditions& bc, const Vec& z) {
  const auto& s = sys.shape;
  UnifiedPoint w(s);
  for (int A = 0; A < s.m; ++A) {
    w.base.q(0, A) = bc.q0[A];
    w.base.q(1, A) = bc.qd0[A];
    w.p(0, A) = z[A];
    w.p(1, A) = z[s.m + A];
  }
  for (int b = 0; b < s.d; ++b) {
    w.base.xi(0, b) = bc.xi0[b];
    w.alpha(0, b) = z[2 * s.m + b];
    w.alpha(1, b) = z[2 * s.m + s.d + b];
  }
  if (s.d > 0) w.base.g = bc.g0;
  return complete_velocities(sys, w);
}

inline Vec terminal_mismatch(const UnifiedSystem& sys, const BoundaryConditions& bc, const UnifiedPoint& wT) {
  const auto& s = sys.shape;
  Vec r(2 * s.m + 2 * s.d);
  for (int A = 0; A < s.m; ++A) {
    r[A] = wT.base.q(0, A) - bc.qT[A];
    r[s.m + A] = wT.base.q(1, A) - bc.qdT[A];
  }
  for (int b = 0; b < s.d; ++b) r[2 * s.m + b] = wT.base.xi(0, b) - bc.xiT[b];
  if (s.d > 0) r.tail(s.d) = sys.G().log(sys.G().compose(sys.G().inverse(bc.gT), wT.base.g));
  return r;
}

inline IntegratorConfig bvp_integrator(const BoundaryConditions& bc, const BvpConfig& cfg) {
  IntegratorConfig ic;
  ic.step = bc.T / cfg.n_steps;
  ic.n_steps = cfg.n_steps;
  ic.projection_tol = cfg.projection_tol;
  return ic;
}

// Composite Simpson rule on a uniform grid (trapezoid on an odd tail).
inline double simpson(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size()) - 1;
  if (n < 1) return 0.0;
  double acc = 0.0;
  int even = n - (n % 2);
  for (int i = 0; i + 2 <= even; i += 2) acc += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  if (n % 2) acc += 0.5 * h * (f[n - 1] + f[n]);
  return acc;
}

// Single shooting on the momentum seeds; Newton with a finite-difference
// Jacobian and step halving.
inline BvpResult solve_bvp(const ReducedOcp& ocp, const UnifiedSystem& sys, const BoundaryConditions& bc,
                           BvpConfig cfg = {}, Vec z0 = Vec()) {
  if (!(bc.T > 0.0)) throw Error(ErrorCode::ConfigError, "horizon must be positive");
  const auto& s = sys.shape;
  const int nz = 2 * (s.m + s.d);
  Vec z = z0.size() == nz ? z0 : Vec::Zero(nz);
  const IntegratorConfig ic = bvp_integrator(bc, cfg);
  auto mismatch = [&](const Vec& zz) { return terminal_mismatch(sys, bc, flow(sys, bvp_initial_point(sys, bc, zz), ic)); };
  auto safe_norm = [&](const Vec& zz, Vec& out) {
    try {
      out = mismatch(zz);
      double v = out.norm();
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  Vec r;
  double rn = safe_norm(z, r);
  if (!std::isfinite(rn)) throw ShootingDiverged("initial shooting guess failed", rn);
  double best = rn;
  int it = 0;
  while (rn > cfg.tol) {
    if (it >= cfg.max_iter) throw ShootingDiverged("shooting did not converge", best);
    ++it;
    Mat J(r.size(), nz);
    for (int j = 0; j < nz; ++j) {
      const double h = cfg.central_jacobian ? second_order_step(z[j]) : first_order_step(z[j]);
      Vec zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      Vec rp, rm = r;
      if (!std::isfinite(safe_norm(zp, rp))) throw ShootingDiverged("Jacobian evaluation failed", best);
      if (cfg.central_jacobian && !std::isfinite(safe_norm(zm, rm)))
        throw ShootingDiverged("Jacobian evaluation failed", best);
      J.col(j) = cfg.central_jacobian ? Vec((rp - rm) / (2.0 * h)) : Vec((rp - r) / h);
    }
    auto try_step = [&](const Vec& dz) {
      Vec rt;
      double nt = safe_norm(z + dz, rt);
      if (nt >= rn) return false;
      z += dz;
      r = rt;
      rn = nt;
      return true;
    };
    Vec dz = least_squares(J, -r);
    bool accepted = false;
    double t = 1.0;
    for (int k = 0; k <= cfg.max_halvings && !accepted; ++k, t *= 0.5) accepted = try_step(t * dz);
    // Damped fallback for ill-conditioned Jacobians.
    if (!accepted && cfg.damped_fallback) {
      const Mat JtJ = J.transpose() * J;
      const Vec g = J.transpose() * (-r);
      double mu = 1e-8 * std::max(JtJ.diagonal().maxCoeff(), 1e-300);
      for (int k = 0; k < 12 && !accepted; ++k, mu *= 10.0)
        accepted = try_step((JtJ + mu * Mat::Identity(nz, nz)).ldlt().solve(g));
    }
    best = std::min(best, rn);
    if (!accepted) throw ShootingDiverged("line search failed to reduce the terminal mismatch", best);
  }
  BvpResult res;
  res.z = z;
  res.iterations = it;
  res.residual = rn;
  auto [traj, log] = integrate(sys, bvp_initial_point(sys, bc, z), ic);
  (void)log;
  res.traj = traj;
  std::vector<double> lt;
  for (const auto& w : traj.points) {
    res.controls.push_back(ocp.controls(w.base));
    lt.push_back(evaluate(ocp.Ltilde, w.base));
  }
  res.cost = simpson(lt, ic.step);
  return res;
}

struct RoundTripReport {
  double force_residual = 0.0;       // |E(jet from samples) - sum_a u_a F^a|, interior max
  double constraint_residual = 0.0;  // |Phi| on the state jets
  double jet_consistency = 0.0;      // |(qd, qdd, xid) - FD of the sampled histories|
};

// Substitutes the recovered controls into the controlled equations using
// jets rebuilt from the sampled (q, xi) histories by finite differences.
inline RoundTripReport round_trip(const ReducedOcp& ocp, const UnifiedSystem& sys, const BvpResult& res) {
  const auto& s = sys.shape;
  std::vector<CurveSample> curve;
  for (size_t i = 0; i < res.traj.size(); ++i) {
    const auto& b = res.traj.points[i].base;
    curve.push_back({res.traj.times[i], b.q.row_vec(0), b.g, s.d > 0 ? b.xi.row_vec(0) : Vec::Zero(0)});
  }
  auto jets = prolong(curve, s);
  RoundTripReport rep;
  const int n = static_cast<int>(jets.size());
  for (int i = 2; i + 2 < n; ++i) {
    const auto& st = res.traj.points[i].base;
    for (int A = 0; A < s.m; ++A) {
      rep.jet_consistency = std::max(rep.jet_consistency, std::abs(jets[i].q(1, A) - st.q(1, A)));
      rep.jet_consistency = std::max(rep.jet_consistency, std::abs(jets[i].q(2, A) - st.q(2, A)));
    }
    for (int b = 0; b < s.d; ++b) rep.jet_consistency = std::max(rep.jet_consistency, std::abs(jets[i].xi(1, b) - st.xi(1, b)));
    Vec E = ocp.forces(jets[i]);
    Mat S = ocp.sections(st.q.row_vec(0));
    Vec coeff = Vec::Zero(s.m + s.d);
    coeff.head(ocp.r) = res.controls[i];
    // E = sum_a u_a F^a with {F^a} dual to the sections: E = S^{-T} coeff.
    Vec pred = S.transpose().partialPivLu().solve(coeff);
    rep.force_residual = std::max(rep.force_residual, (E - pred).lpNorm<Eigen::Infinity>());
    for (const auto& phi : ocp.Phis) rep.constraint_residual = std::max(rep.constraint_residual, std::abs(evaluate(phi, st)));
  }
  return rep;
}

}  // namespace unimech

#endif  // UNIMECH_OPTIMAL_CONTROL_HPP
