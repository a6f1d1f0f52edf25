#ifndef UNIMECH_LIE_GROUP_HPP
#define UNIMECH_LIE_GROUP_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "unimech/errors.hpp"

namespace unimech {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using LieAlgebraElement = Vec;
using LieCoalgebraElement = Vec;
using LieGroupElement = Vec;  // chart coordinates

inline double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  double r = std::remainder(a, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

// Elements are carried as chart vectors of length dim(). Structure constants
// follow [e_a, e_b] = C^c_{ab} e_c and are stored as C[(c*d + a)*d + b].
class LieGroup {
 public:
  virtual ~LieGroup() = default;

  virtual std::string name() const = 0;
  int dim() const { return dim_; }

  virtual Vec identity() const { return Vec::Zero(dim_); }
  virtual Vec exp(const Vec& x) const = 0;
  virtual Vec log(const Vec& g) const = 0;
  virtual Vec compose(const Vec& a, const Vec& b) const = 0;
  virtual Vec inverse(const Vec& a) const = 0;
  virtual Vec wrap_for_output(const Vec& g) const { return g; }

  double C(int c, int a, int b) const { return C_[(c * dim_ + a) * dim_ + b]; }
  const std::vector<double>& structure_constants() const { return C_; }

  Vec bracket(const Vec& x, const Vec& y) const {
    Vec out = Vec::Zero(dim_);
    for (int c = 0; c < dim_; ++c)
      for (int a = 0; a < dim_; ++a) {
        if (x[a] == 0.0) continue;
        for (int b = 0; b < dim_; ++b) out[c] += C(c, a, b) * x[a] * y[b];
      }
    return out;
  }

  // (ad*_x alpha)_b = C^c_{ab} x^a alpha_c
  template <class T>
  std::vector<T> ad_star(const std::vector<T>& x, const std::vector<T>& alpha) const {
    std::vector<T> out(dim_, T(0.0));
    for (int b = 0; b < dim_; ++b)
      for (int a = 0; a < dim_; ++a)
        for (int c = 0; c < dim_; ++c) {
          double k = C(c, a, b);
          if (k != 0.0) out[b] = out[b] + k * (x[a] * alpha[c]);
        }
    return out;
  }

  Vec ad_star(const Vec& x, const Vec& alpha) const {
    Vec out = Vec::Zero(dim_);
    for (int b = 0; b < dim_; ++b)
      for (int a = 0; a < dim_; ++a)
        for (int c = 0; c < dim_; ++c) out[b] += C(c, a, b) * x[a] * alpha[c];
    return out;
  }

  Mat ad(const Vec& x) const {
    Mat out = Mat::Zero(dim_, dim_);
    for (int c = 0; c < dim_; ++c)
      for (int b = 0; b < dim_; ++b)
        for (int a = 0; a < dim_; ++a) out(c, b) += C(c, a, b) * x[a];
    return out;
  }

  // Truncated inverse of the dexp series; enough for fourth-order
  // Munthe-Kaas stages.
  Vec dexp_inv(const Vec& u, const Vec& v) const {
    Vec uv = bracket(u, v);
    return v - 0.5 * uv + bracket(u, uv) / 12.0;
  }

 protected:
  explicit LieGroup(int d) : dim_(d), C_(static_cast<size_t>(d) * d * d, 0.0) {}
  void set_C(int c, int a, int b, double v) { C_[(c * dim_ + a) * dim_ + b] = v; }

  int dim_;
  std::vector<double> C_;
};

using GroupPtr = std::shared_ptr<const LieGroup>;

class RealVectorGroup final : public LieGroup {
 public:
  explicit RealVectorGroup(int n) : LieGroup(n) {}
  std::string name() const override { return "R^" + std::to_string(dim_); }
  Vec exp(const Vec& x) const override { return x; }
  Vec log(const Vec& g) const override { return g; }
  Vec compose(const Vec& a, const Vec& b) const override { return a + b; }
  Vec inverse(const Vec& a) const override { return -a; }
};

class CircleGroup final : public LieGroup {
 public:
  CircleGroup() : LieGroup(1) {}
  std::string name() const override { return "S1"; }
  Vec exp(const Vec& x) const override { return x; }
  Vec log(const Vec& g) const override { return Vec::Constant(1, wrap_angle(g[0])); }
  Vec compose(const Vec& a, const Vec& b) const override { return a + b; }
  Vec inverse(const Vec& a) const override { return -a; }
  Vec wrap_for_output(const Vec& g) const override { return Vec::Constant(1, wrap_angle(g[0])); }
};

// Rotation-vector chart; basis e_a = hat(unit_a), so C^c_{ab} = eps_{abc}.
class SO3Group final : public LieGroup {
 public:
  SO3Group() : LieGroup(3) {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) set_C(c, a, b, levi_civita(a, b, c));
  }
  std::string name() const override { return "SO3"; }

  static Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
    Eigen::Matrix3d m;
    m << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
    return m;
  }

  static Eigen::Matrix3d rotation(const Vec& w) {
    Eigen::Vector3d v(w[0], w[1], w[2]);
    double th = v.norm();
    Eigen::Matrix3d K = hat(v);
    double a, b;
    if (th < 1e-5) {
      double t2 = th * th;
      a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
      b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    } else {
      a = std::sin(th) / th;
      b = (1.0 - std::cos(th)) / (th * th);
    }
    return Eigen::Matrix3d::Identity() + a * K + b * K * K;
  }

  static Vec rotvec(const Eigen::Matrix3d& R) {
    Eigen::Quaterniond q(R);
    q.normalize();
    if (q.w() < 0) q.coeffs() *= -1.0;
    Eigen::Vector3d v = q.vec();
    double s = v.norm();
    Vec out(3);
    if (s < 1e-12) {
      out = 2.0 * v / q.w();
      return out;
    }
    double angle = 2.0 * std::atan2(s, q.w());
    out = (angle / s) * v;
    return out;
  }

  Vec exp(const Vec& x) const override { return rotvec(rotation(x)); }
  Vec log(const Vec& g) const override { return rotvec(rotation(g)); }
  Vec compose(const Vec& a, const Vec& b) const override { return rotvec(rotation(a) * rotation(b)); }
  Vec inverse(const Vec& a) const override { return -a; }

 private:
  static double levi_civita(int a, int b, int c) {
    if (a == b || b == c || a == c) return 0.0;
    return ((a == 0 && b == 1) || (a == 1 && b == 2) || (a == 2 && b == 0)) ? 1.0 : -1.0;
  }
};

// Chart (x, y, theta). Basis: e1 = translation along +x, e2 = translation
// along -y, e3 = counter-clockwise rotation. With this realization the matrix
// commutators are [e1,e3] = e2, [e2,e3] = -e1, [e1,e2] = 0.
class SE2Group final : public LieGroup {
 public:
  SE2Group() : LieGroup(3) {
    set_C(1, 2, 0, -1.0);  // C^2_{31}
    set_C(0, 1, 2, -1.0);  // C^1_{23}
    set_C(1, 0, 2, 1.0);   // C^2_{13}
    set_C(0, 2, 1, 1.0);   // C^1_{32}
  }
  std::string name() const override { return "SE2"; }

  static Eigen::Matrix3d algebra_matrix(const Vec& xi) {
    Eigen::Matrix3d m;
    m << 0, -xi[2], xi[0], xi[2], 0, -xi[1], 0, 0, 0;
    return m;
  }
  static Eigen::Matrix3d matrix(const Vec& g) {
    double c = std::cos(g[2]), s = std::sin(g[2]);
    Eigen::Matrix3d m;
    m << c, -s, g[0], s, c, g[1], 0, 0, 1;
    return m;
  }

  Vec exp(const Vec& xi) const override {
    double th = xi[2];
    double a, b;  // V = [[a, -b], [b, a]]
    if (std::abs(th) < 1e-5) {
      double t2 = th * th;
      a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
      b = th / 2.0 - th * t2 / 24.0;
    } else {
      a = std::sin(th) / th;
      b = (1.0 - std::cos(th)) / th;
    }
    double vx = xi[0], vy = -xi[1];
    Vec g(3);
    g << a * vx - b * vy, b * vx + a * vy, th;
    return g;
  }

  Vec log(const Vec& g) const override {
    double th = wrap_angle(g[2]);
    double a, b;
    if (std::abs(th) < 1e-5) {
      double t2 = th * th;
      a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
      b = th / 2.0 - th * t2 / 24.0;
    } else {
      a = std::sin(th) / th;
      b = (1.0 - std::cos(th)) / th;
    }
    double det = a * a + b * b;
    double vx = (a * g[0] + b * g[1]) / det;
    double vy = (-b * g[0] + a * g[1]) / det;
    Vec xi(3);
    xi << vx, -vy, th;
    return xi;
  }

  Vec compose(const Vec& g, const Vec& h) const override {
    double c = std::cos(g[2]), s = std::sin(g[2]);
    Vec out(3);
    out << g[0] + c * h[0] - s * h[1], g[1] + s * h[0] + c * h[1], g[2] + h[2];
    return out;
  }

  Vec inverse(const Vec& g) const override {
    double c = std::cos(g[2]), s = std::sin(g[2]);
    Vec out(3);
    out << -(c * g[0] + s * g[1]), -(-s * g[0] + c * g[1]), -g[2];
    return out;
  }

  Vec wrap_for_output(const Vec& g) const override {
    Vec out = g;
    out[2] = wrap_angle(g[2]);
    return out;
  }
};

class ProductGroup final : public LieGroup {
 public:
  ProductGroup(GroupPtr a, GroupPtr b) : LieGroup(a->dim() + b->dim()), a_(std::move(a)), b_(std::move(b)) {
    int da = a_->dim(), db = b_->dim();
    for (int c = 0; c < da; ++c)
      for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j) set_C(c, i, j, a_->C(c, i, j));
    for (int c = 0; c < db; ++c)
      for (int i = 0; i < db; ++i)
        for (int j = 0; j < db; ++j) set_C(da + c, da + i, da + j, b_->C(c, i, j));
  }
  std::string name() const override { return "product(" + a_->name() + "," + b_->name() + ")"; }

  Vec exp(const Vec& x) const override { return join(a_->exp(head(x)), b_->exp(tail(x))); }
  Vec log(const Vec& g) const override { return join(a_->log(head(g)), b_->log(tail(g))); }
  Vec compose(const Vec& g, const Vec& h) const override {
    return join(a_->compose(head(g), head(h)), b_->compose(tail(g), tail(h)));
  }
  Vec inverse(const Vec& g) const override { return join(a_->inverse(head(g)), b_->inverse(tail(g))); }
  Vec wrap_for_output(const Vec& g) const override {
    return join(a_->wrap_for_output(head(g)), b_->wrap_for_output(tail(g)));
  }
  const GroupPtr& first() const { return a_; }
  const GroupPtr& second() const { return b_; }

 private:
  Vec head(const Vec& v) const { return v.head(a_->dim()); }
  Vec tail(const Vec& v) const { return v.tail(b_->dim()); }
  static Vec join(const Vec& a, const Vec& b) {
    Vec out(a.size() + b.size());
    out << a, b;
    return out;
  }
  GroupPtr a_, b_;
};

// User-defined group from callables plus structure constants.
class CustomGroup final : public LieGroup {
 public:
  using Unary = std::function<Vec(const Vec&)>;
  using Binary = std::function<Vec(const Vec&, const Vec&)>;
  CustomGroup(std::string name, int d, Unary exp_fn, Unary log_fn, Binary compose_fn, Unary inverse_fn,
              const std::vector<double>& structure)
      : LieGroup(d), name_(std::move(name)), exp_(std::move(exp_fn)), log_(std::move(log_fn)),
        compose_(std::move(compose_fn)), inverse_(std::move(inverse_fn)) {
    if (structure.size() != C_.size())
      throw Error(ErrorCode::InvariantViolation, "structure constant tensor must have d^3 entries");
    C_ = structure;
  }
  std::string name() const override { return name_; }
  Vec exp(const Vec& x) const override { return exp_(x); }
  Vec log(const Vec& g) const override { return log_(g); }
  Vec compose(const Vec& a, const Vec& b) const override { return compose_(a, b); }
  Vec inverse(const Vec& a) const override { return inverse_(a); }

 private:
  std::string name_;
  Unary exp_, log_;
  Binary compose_;
  Unary inverse_;
};

inline GroupPtr make_group(const std::string& id) {
  auto trim = [](std::string s) {
    size_t b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::string s = trim(id);
  if (s == "S1") return std::make_shared<CircleGroup>();
  if (s == "SO3") return std::make_shared<SO3Group>();
  if (s == "SE2") return std::make_shared<SE2Group>();
  if (s.rfind("R^", 0) == 0) {
    try {
      size_t used = 0;
      int n = std::stoi(s.substr(2), &used);
      if (n >= 0 && used == s.size() - 2) return std::make_shared<RealVectorGroup>(n);
    } catch (const std::exception&) {
    }
  }
  if (s.rfind("product(", 0) == 0 && s.back() == ')') {
    std::string inner = s.substr(8, s.size() - 9);
    int depth = 0;
    for (size_t i = 0; i < inner.size(); ++i) {
      if (inner[i] == '(') ++depth;
      if (inner[i] == ')') --depth;
      if (inner[i] == ',' && depth == 0)
        return std::make_shared<ProductGroup>(make_group(inner.substr(0, i)), make_group(inner.substr(i + 1)));
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown group identifier '" + id + "'");
}

inline Vec exp(const LieGroup& G, const Vec& x) { return G.exp(x); }
inline Vec ad_star(const LieGroup& G, const Vec& x, const Vec& alpha) { return G.ad_star(x, alpha); }

inline double group_fd_step(const Vec& g) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + g.norm());
}

// Component b is d/dt f(g exp(t e_b)) at t = 0, by central differences.
inline Vec trivialized_group_derivative(const std::function<double(const Vec&)>& f, const LieGroup& G,
                                        const Vec& g) {
  const int d = G.dim();
  const double h = group_fd_step(g);
  Vec out(d);
  for (int b = 0; b < d; ++b) {
    Vec e = Vec::Zero(d);
    e[b] = h;
    double fp = f(G.compose(g, G.exp(e)));
    double fm = f(G.compose(g, G.exp(-e)));
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw Error(ErrorCode::NonFinite, "non-finite value in group derivative stencil");
    out[b] = (fp - fm) / (2.0 * h);
  }
  return out;
}

}  // namespace unimech

#endif  // UNIMECH_LIE_GROUP_HPP
