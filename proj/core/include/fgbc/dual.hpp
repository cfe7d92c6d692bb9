#pragma once

// Forward-mode automatic differentiation with nestable dual numbers.
//
// Dual<T, N> carries a value and N directional derivatives, each of type T.
// Nesting (Dual<Dual<double, 2>, 2>, ...) yields higher-order derivatives:
// the outer derivative slot of an inner derivative slot is a mixed second
// derivative, and so on. Only arithmetic with other Duals of the same type
// and with plain doubles is supported.

#include <array>
#include <cmath>
#include <type_traits>

namespace fgbc::ad {

template <typename T, int N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  constexpr Dual() = default;
  constexpr Dual(double c) : v(c) {}  // NOLINT: implicit by design of AD scalars
  template <typename U = T>
    requires(!std::is_same_v<U, double>)
  constexpr explicit Dual(const T& value) : v(value) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }
  Dual& operator*=(double s) {
    v *= s;
    for (int i = 0; i < N; ++i) d[i] *= s;
    return *this;
  }

  friend Dual operator-(const Dual& a) {
    Dual r;
    r.v = -a.v;
    for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
    return r;
  }
  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator+(Dual a, double s) {
    a.v += s;
    return a;
  }
  friend Dual operator+(double s, Dual a) {
    a.v += s;
    return a;
  }
  friend Dual operator-(Dual a, double s) {
    a.v -= s;
    return a;
  }
  friend Dual operator-(double s, const Dual& a) { return -a + s; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v * b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.v * b.d[i] + a.d[i] * b.v;
    return r;
  }
  friend Dual operator*(Dual a, double s) { return a *= s; }
  friend Dual operator*(double s, Dual a) { return a *= s; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    const T inv = 1.0 / b.v;
    Dual r;
    r.v = a.v * inv;
    for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
    return r;
  }
  friend Dual operator/(Dual a, double s) { return a *= 1.0 / s; }
  friend Dual operator/(double s, const Dual& b) {
    const T inv = 1.0 / b.v;
    Dual r;
    r.v = s * inv;
    const T f = -r.v * inv;
    for (int i = 0; i < N; ++i) r.d[i] = f * b.d[i];
    return r;
  }

  friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
  friend bool operator<(const Dual& a, double s) { return a.v < s; }
  friend bool operator>(const Dual& a, double s) { return a.v > s; }
};

/// Innermost real value of a (possibly nested) AD scalar.
inline double value(double x) { return x; }
template <typename T, int N>
double value(const Dual<T, N>& x) {
  return value(x.v);
}

namespace detail {
// r = f(a) given f(a.v) and f'(a.v).
template <typename T, int N>
Dual<T, N> chain(const Dual<T, N>& a, const T& fv, const T& dfv) {
  Dual<T, N> r;
  r.v = fv;
  for (int i = 0; i < N; ++i) r.d[i] = dfv * a.d[i];
  return r;
}
}  // namespace detail

template <typename T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  using std::sqrt;
  const T s = sqrt(a.v);
  return detail::chain(a, s, 0.5 / s);
}

template <typename T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
  using std::exp;
  const T e = exp(a.v);
  return detail::chain(a, e, e);
}

template <typename T, int N>
Dual<T, N> log(const Dual<T, N>& a) {
  using std::log;
  return detail::chain(a, T(log(a.v)), T(1.0 / a.v));
}

template <typename T, int N>
Dual<T, N> sin(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return detail::chain(a, T(sin(a.v)), T(cos(a.v)));
}

template <typename T, int N>
Dual<T, N> cos(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return detail::chain(a, T(cos(a.v)), T(-sin(a.v)));
}

template <typename T, int N>
Dual<T, N> pow(const Dual<T, N>& a, double p) {
  using std::pow;
  const T ap1 = pow(a.v, p - 1.0);
  return detail::chain(a, T(ap1 * a.v), T(p * ap1));
}

template <typename T, int N>
Dual<T, N> atan2(const Dual<T, N>& y, const Dual<T, N>& x) {
  using std::atan2;
  Dual<T, N> r;
  r.v = atan2(y.v, x.v);
  const T inv = 1.0 / (x.v * x.v + y.v * y.v);
  for (int i = 0; i < N; ++i) r.d[i] = (x.v * y.d[i] - y.v * x.d[i]) * inv;
  return r;
}

template <typename T, int N>
Dual<T, N> abs(const Dual<T, N>& a) {
  return value(a) < 0.0 ? -a : a;
}

/// Seed variable `slot` with unit derivative at one nesting level.
template <typename T, int N>
Dual<T, N> variable(const T& x, int slot) {
  Dual<T, N> r(x);
  if constexpr (std::is_same_v<T, double>) {
    r.v = x;
  }
  r.d[slot] = T(1.0);
  return r;
}

}  // namespace fgbc::ad
