#ifndef UNIMECH_DUAL_HPP
#define UNIMECH_DUAL_HPP

// Forward-mode dual numbers. Nesting Dual<Dual<double>> gives second
// derivatives; user functions must be templates over the scalar type.

#include <cmath>
#include <type_traits>

namespace unimech {

template <class T>
struct Dual {
  using value_type = T;
  T v{};
  T d{};

  Dual() = default;
  Dual(const T& value, const T& deriv) : v(value), d(deriv) {}
  template <class S>
    requires std::is_arithmetic_v<S>
  Dual(S x) : v(T(x)), d(T(0)) {}
  Dual(const T& value)
    requires(!std::is_arithmetic_v<T>)
      : v(value), d(T(0)) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.v); }

template <class T>
Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T>
Dual<T> operator+(const Dual<T>& a) { return a; }

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T inv = T(1) / b.v;
  T q = a.v * inv;
  return {q, (a.d - q * b.d) * inv};
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const std::type_identity_t<T>& b) { return {a.v + b, a.d}; }
template <class T>
Dual<T> operator+(const std::type_identity_t<T>& a, const Dual<T>& b) { return {a + b.v, b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a, const std::type_identity_t<T>& b) { return {a.v - b, a.d}; }
template <class T>
Dual<T> operator-(const std::type_identity_t<T>& a, const Dual<T>& b) { return {a - b.v, -b.d}; }
template <class T>
Dual<T> operator*(const Dual<T>& a, const std::type_identity_t<T>& b) { return {a.v * b, a.d * b}; }
template <class T>
Dual<T> operator*(const std::type_identity_t<T>& a, const Dual<T>& b) { return {a * b.v, a * b.d}; }
template <class T>
Dual<T> operator/(const Dual<T>& a, const std::type_identity_t<T>& b) { return {a.v / b, a.d / b}; }
template <class T>
Dual<T> operator/(const std::type_identity_t<T>& a, const Dual<T>& b) { return Dual<T>(a) / b; }

template <class T>
bool operator<(const Dual<T>& a, const Dual<T>& b) { return value_of(a) < value_of(b); }
template <class T>
bool operator>(const Dual<T>& a, const Dual<T>& b) { return value_of(a) > value_of(b); }
template <class T>
bool operator<=(const Dual<T>& a, const Dual<T>& b) { return value_of(a) <= value_of(b); }
template <class T>
bool operator>=(const Dual<T>& a, const Dual<T>& b) { return value_of(a) >= value_of(b); }
template <class T>
bool operator<(const Dual<T>& a, double b) { return value_of(a) < b; }
template <class T>
bool operator>(const Dual<T>& a, double b) { return value_of(a) > b; }
template <class T>
bool operator<(double a, const Dual<T>& b) { return a < value_of(b); }
template <class T>
bool operator>(double a, const Dual<T>& b) { return a > value_of(b); }

template <class T>
Dual<T> sin(const Dual<T>& x) {
  using std::cos, std::sin;
  return {sin(x.v), cos(x.v) * x.d};
}
template <class T>
Dual<T> cos(const Dual<T>& x) {
  using std::cos, std::sin;
  return {cos(x.v), -sin(x.v) * x.d};
}
template <class T>
Dual<T> tan(const Dual<T>& x) {
  using std::tan;
  T t = tan(x.v);
  return {t, (T(1) + t * t) * x.d};
}
template <class T>
Dual<T> exp(const Dual<T>& x) {
  using std::exp;
  T e = exp(x.v);
  return {e, e * x.d};
}
template <class T>
Dual<T> log(const Dual<T>& x) {
  using std::log;
  return {log(x.v), x.d / x.v};
}
template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  using std::sqrt;
  T r = sqrt(x.v);
  return {r, x.d / (T(2) * r)};
}
template <class T>
Dual<T> pow(const Dual<T>& x, double n) {
  using std::pow;
  return {pow(x.v, n), T(n) * pow(x.v, n - 1.0) * x.d};
}
template <class T>
Dual<T> atan(const Dual<T>& x) {
  using std::atan;
  return {atan(x.v), x.d / (T(1) + x.v * x.v)};
}
template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  using std::atan2;
  T r2 = x.v * x.v + y.v * y.v;
  return {atan2(y.v, x.v), (x.v * y.d - y.v * x.d) / r2};
}
template <class T>
Dual<T> abs(const Dual<T>& x) {
  return value_of(x) < 0.0 ? -x : x;
}

// Lift a constant into a (possibly nested) dual type.
template <class S>
S lift(double x) { return S(x); }

}  // namespace unimech

#endif  // UNIMECH_DUAL_HPP
