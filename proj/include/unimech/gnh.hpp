#ifndef UNIMECH_GNH_HPP
#define UNIMECH_GNH_HPP

#include <functional>
#include <string>
#include <vector>

#include "unimech/projection.hpp"

namespace unimech {

enum class GnhStatus { Converged, EmptyFinal, MaxIterations };

inline const char* to_string(GnhStatus s) {
  switch (s) {
    case GnhStatus::Converged: return "Converged";
    case GnhStatus::EmptyFinal: return "EmptyFinal";
    case GnhStatus::MaxIterations: return "MaxIterations";
  }
  return "Unknown";
}

struct GnhLevel {
  int rank = 0;
  int dim = 0;
  int n_new_constraints = 0;
  std::vector<std::string> labels;
  std::function<Vec(const UnifiedPoint&)> constraint;  // new constraints found at this level, if any
};

struct GnhReport {
  std::vector<GnhLevel> levels;
  GnhStatus status = GnhStatus::Converged;
};

struct GnhConfig {
  int max_iter = 10;
  double rank_tol = 1e-9;     // analytic coefficient matrices
  double fd_rank_tol = 1e-6;  // finite-difference constraint Jacobians
  double zero_tol = 1e-6;     // candidate counted as vanishing, scaled by 1 + |w|
  double projection_tol = 1e-10;
};

namespace detail {

using VecFn = std::function<Vec(const UnifiedPoint&)>;

// Tangency system of the compatibility constraints in the unknowns
// (F_k, xi_1^k, d lambda/dt): rows d/dt[p_top - grad_top L_lambda] and d/dt Phi.
inline std::pair<Mat, Vec> compatibility_tangency(const UnifiedSystem& sys, const UnifiedPoint& w) {
  const int t = sys.top(), n = sys.n();
  PointData pd = point_data(sys, w);
  UnifiedVectorField known = known_field(sys, w, pd);
  TangencySystem ts = tangency_system(sys, w, pd, known);
  Mat K = ts.K;
  K.topLeftCorner(t, t) *= -1.0;
  Vec b = ts.rhs;
  b.head(t) *= -1.0;
  (void)n;
  return {K, b};
}

inline Mat left_null_basis(const Mat& K, int count) {
  Eigen::JacobiSVD<Mat> svd(K, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(count);
}

// Closest orthonormal frame inside span(N) to the frozen frame N0.
inline Mat aligned_frame(const Mat& N, const Mat& N0) {
  Mat V = N * (N.transpose() * N0);
  Mat S = V.transpose() * V;
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  Vec ev = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return V * (es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

inline Vec known_tangent(const UnifiedSystem& sys, const UnifiedPoint& w) {
  PointData pd = point_data(sys, w);
  return tangent_from_field(sys.shape, known_field(sys, w, pd));
}

// Rows of the level system contributed by velocity-free constraints psi:
// d psi/d(top) u = -d psi(X_known).
inline std::pair<Mat, Vec> psi_rows(const UnifiedSystem& sys, const VecFn& psi, const UnifiedPoint& w) {
  const auto& s = sys.shape;
  const auto o = flat_offsets(s);
  const int t = sys.top(), n = sys.n();
  Vec base = psi(w);
  const int q = static_cast<int>(base.size());
  Mat rows = Mat::Zero(q, t + n);
  std::vector<int> slots;
  for (int A = 0; A < s.m; ++A) slots.push_back(o.q + s.k * s.m + A);
  for (int b = 0; b < s.d; ++b) slots.push_back(o.xi + (s.k - 1) * s.d + b);
  Vec flat = flatten(w);
  const int N = flat_dim(s);
  for (int c = 0; c < t; ++c) {
    const double h = second_order_step(flat[slots[c]]);
    Vec e = Vec::Zero(N);
    e[slots[c]] = 1.0;
    rows.col(c) = (psi(retract(sys.G(), w, e, h)) - psi(retract(sys.G(), w, e, -h))) / (2.0 * h);
  }
  Vec X = known_tangent(sys, w);
  const double hx = second_order_step(flat.norm()) / std::max(1.0, X.norm());
  Vec rhs = -(psi(retract(sys.G(), w, X, hx)) - psi(retract(sys.G(), w, X, -hx))) / (2.0 * hx);
  return {rows, rhs};
}

struct LevelSystem {
  const UnifiedSystem* sys;
  std::vector<VecFn> psis;

  std::pair<Mat, Vec> operator()(const UnifiedPoint& w) const {
    auto [K, b] = compatibility_tangency(*sys, w);
    for (const auto& psi : psis) {
      auto [R, r] = psi_rows(*sys, psi, w);
      Mat K2(K.rows() + R.rows(), K.cols());
      K2 << K, R;
      Vec b2(b.size() + r.size());
      b2 << b, r;
      K = K2;
      b = b2;
    }
    return {K, b};
  }
};

inline int fd_constraint_rank(const UnifiedSystem& sys, const VecFn& c, const std::vector<UnifiedPoint>& pts,
                              double tol) {
  int r = 0;
  for (const auto& w : pts) r = std::max(r, numeric_rank(tangent_jacobian(sys.G(), c, w), tol));
  return r;
}

inline VecFn stack(std::vector<VecFn> fns) {
  return [fns](const UnifiedPoint& w) {
    std::vector<Vec> parts;
    Eigen::Index total = 0;
    for (const auto& f : fns) {
      parts.push_back(f(w));
      total += parts.back().size();
    }
    Vec out(total);
    Eigen::Index i = 0;
    for (const auto& p : parts) {
      out.segment(i, p.size()) = p;
      i += p.size();
    }
    return out;
  };
}

}  // namespace detail

inline std::vector<std::string> compatibility_labels(const UnifiedSystem& sys) {
  std::vector<std::string> labels;
  const auto& s = sys.shape;
  for (int A = 0; A < s.m; ++A) labels.push_back("p" + std::to_string(s.k - 1) + "_" + std::to_string(A) + " - dL/dq" + std::to_string(s.k) + "_" + std::to_string(A));
  for (int b = 0; b < s.d; ++b) labels.push_back("alpha" + std::to_string(s.k - 1) + "_" + std::to_string(b) + " - dL/dxi" + std::to_string(s.k - 1) + "_" + std::to_string(b));
  for (int a = 0; a < sys.n(); ++a)
    labels.push_back(sys.constraints[a].label.empty() ? "phi" + std::to_string(a + 1) : sys.constraints[a].label);
  return labels;
}

// Numeric constraint algorithm over a finite sample set. Level 1 is the
// compatibility submanifold; each later level adds the left-null contractions
// of the tangency system that do not vanish on the current samples.
inline GnhReport gnh_run(const UnifiedSystem& sys, const std::vector<UnifiedPoint>& seeds, GnhConfig cfg = {}) {
  using namespace detail;
  GnhReport report;
  const int N = flat_dim(sys.shape);
  VecFn C1 = [&sys](const UnifiedPoint& w) { return wc_residual(sys, w); };

  std::vector<UnifiedPoint> samples;
  for (const auto& w : seeds) {
    try {
      samples.push_back(project_wc(sys, w, {cfg.projection_tol, 20}));
    } catch (const Error&) {
    }
  }
  LevelSystem level{&sys, {}};
  auto level_rank = [&](const std::vector<UnifiedPoint>& pts) {
    int r = 0;
    for (const auto& w : pts) r = std::max(r, numeric_rank(level(w).first, cfg.rank_tol));
    return r;
  };
  if (samples.empty()) {
    GnhLevel lv;
    try {
      lv.rank = level_rank(seeds);
    } catch (const Error&) {
    }
    lv.dim = N - fd_constraint_rank(sys, C1, seeds, cfg.fd_rank_tol);
    lv.labels = compatibility_labels(sys);
    report.levels.push_back(lv);
    report.status = GnhStatus::EmptyFinal;
    return report;
  }

  // Level 1.
  {
    GnhLevel lv;
    lv.rank = level_rank(samples);
    lv.dim = N - fd_constraint_rank(sys, C1, samples, cfg.fd_rank_tol);
    const int rows = sys.top() + sys.n();
    const int nnull = rows - lv.rank;
    lv.labels = compatibility_labels(sys);
    lv.n_new_constraints = nnull;
    if (nnull > 0) {
      Mat N0 = left_null_basis(level(samples.front()).first, nnull);
      VecFn psi = [&sys, N0, nnull](const UnifiedPoint& w) {
        Mat K = compatibility_tangency(sys, w).first;
        Mat V = aligned_frame(left_null_basis(K, nnull), N0);
        return Vec(V.transpose() * wc_residual(sys, w));
      };
      level.psis.push_back(psi);
      lv.constraint = psi;
      for (int j = 0; j < nnull; ++j) lv.labels.push_back("psi1_" + std::to_string(j + 1));
    }
    report.levels.push_back(lv);
    if (nnull == 0) {
      report.status = GnhStatus::Converged;
      return report;
    }
  }

  for (int l = 2; l <= cfg.max_iter; ++l) {
    std::vector<VecFn> all{C1};
    for (const auto& p : level.psis) all.push_back(p);
    VecFn current = stack(all);
    std::vector<UnifiedPoint> kept;
    for (const auto& w : samples) {
      UnifiedPoint x = w;
      if (project_generic(sys.G(), current, x, cfg.projection_tol * 100.0)) kept.push_back(x);
    }
    GnhLevel lv;
    if (kept.empty()) {
      lv.dim = N - fd_constraint_rank(sys, current, samples, cfg.fd_rank_tol);
      report.levels.push_back(lv);
      report.status = GnhStatus::EmptyFinal;
      return report;
    }
    samples = kept;
    lv.rank = level_rank(samples);
    lv.dim = N - fd_constraint_rank(sys, current, samples, cfg.fd_rank_tol);
    auto [K0, b0] = level(samples.front());
    const int nnull = static_cast<int>(K0.rows()) - lv.rank;
    std::vector<int> keep;
    Mat N0;
    if (nnull > 0) {
      N0 = left_null_basis(K0, nnull);
      std::vector<double> peak(nnull, 0.0);
      for (const auto& w : samples) {
        auto [K, b] = level(w);
        Vec c = aligned_frame(left_null_basis(K, nnull), N0).transpose() * b;
        const double scale = 1.0 + flatten(w).norm();
        for (int j = 0; j < nnull; ++j) peak[j] = std::max(peak[j], std::abs(c[j]) / scale);
      }
      for (int j = 0; j < nnull; ++j)
        if (peak[j] > cfg.zero_tol) keep.push_back(j);
    }
    lv.n_new_constraints = static_cast<int>(keep.size());
    for (size_t j = 0; j < keep.size(); ++j) lv.labels.push_back("psi" + std::to_string(l) + "_" + std::to_string(j + 1));
    report.levels.push_back(lv);
    if (keep.empty()) {
      report.status = GnhStatus::Converged;
      return report;
    }
    LevelSystem frozen = level;
    VecFn psi = [frozen, N0, nnull, keep](const UnifiedPoint& w) {
      auto [K, b] = frozen(w);
      Vec c = aligned_frame(left_null_basis(K, nnull), N0).transpose() * b;
      Vec out(keep.size());
      for (size_t j = 0; j < keep.size(); ++j) out[j] = c[keep[j]];
      return out;
    };
    level.psis.push_back(psi);
    report.levels.back().constraint = psi;
  }
  report.status = GnhStatus::MaxIterations;
  return report;
}

}  // namespace unimech

#endif  // UNIMECH_GNH_HPP
