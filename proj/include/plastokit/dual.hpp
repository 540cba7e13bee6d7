#pragma once

#include <array>
#include <cmath>
#include <type_traits>

namespace plastokit {

/// Forward-mode dual number with a fixed-width tangent block. V may itself be
/// a Dual, which yields second derivatives by nesting.
template <class V, int N>
struct Dual {
  V val{};
  std::array<V, N> d{};

  Dual() = default;
  Dual(double v) : val(v) {}  // NOLINT: implicit promotion of constants
  template <class U, std::enable_if_t<std::is_same_v<U, V> && !std::is_same_v<V, double>, int> = 0>
  Dual(const U& v) : val(v) {}  // NOLINT

  /// Variable seeded along coordinate i.
  static Dual variable(double v, int i) {
    Dual x(v);
    x.d[i] = V(1.0);
    return x;
  }

  Dual& operator+=(const Dual& o) {
    val += o.val;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    val -= o.val;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.val + val * o.d[i];
    val *= o.val;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const V inv = V(1.0) / o.val;
    const V q = val * inv;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - q * o.d[i]) * inv;
    val = q;
    return *this;
  }
  Dual& operator+=(double s) {
    val += s;
    return *this;
  }
  Dual& operator-=(double s) {
    val -= s;
    return *this;
  }
  Dual& operator*=(double s) {
    val *= s;
    for (auto& g : d) g *= s;
    return *this;
  }
  Dual& operator/=(double s) { return *this *= (1.0 / s); }
};

template <class T>
struct is_dual : std::false_type {};
template <class V, int N>
struct is_dual<Dual<V, N>> : std::true_type {};

inline double value_of(double x) { return x; }
template <class V, int N>
double value_of(const Dual<V, N>& x) {
  return value_of(x.val);
}

template <class V, int N>
Dual<V, N> operator-(Dual<V, N> a) {
  a.val = -a.val;
  for (auto& g : a.d) g = -g;
  return a;
}

template <class V, int N>
Dual<V, N> operator+(Dual<V, N> a, const Dual<V, N>& b) {
  return a += b;
}
template <class V, int N>
Dual<V, N> operator-(Dual<V, N> a, const Dual<V, N>& b) {
  return a -= b;
}
template <class V, int N>
Dual<V, N> operator*(Dual<V, N> a, const Dual<V, N>& b) {
  return a *= b;
}
template <class V, int N>
Dual<V, N> operator/(Dual<V, N> a, const Dual<V, N>& b) {
  return a /= b;
}

template <class V, int N>
Dual<V, N> operator+(Dual<V, N> a, double b) {
  return a += b;
}
template <class V, int N>
Dual<V, N> operator+(double b, Dual<V, N> a) {
  return a += b;
}
template <class V, int N>
Dual<V, N> operator-(Dual<V, N> a, double b) {
  return a -= b;
}
template <class V, int N>
Dual<V, N> operator-(double b, const Dual<V, N>& a) {
  return -a + b;
}
template <class V, int N>
Dual<V, N> operator*(Dual<V, N> a, double b) {
  return a *= b;
}
template <class V, int N>
Dual<V, N> operator*(double b, Dual<V, N> a) {
  return a *= b;
}
template <class V, int N>
Dual<V, N> operator/(Dual<V, N> a, double b) {
  return a /= b;
}
template <class V, int N>
Dual<V, N> operator/(double b, const Dual<V, N>& a) {
  return Dual<V, N>(b) / a;
}

#define PLASTOKIT_DUAL_CMP(op)                                             \
  template <class V, int N>                                                \
  bool operator op(const Dual<V, N>& a, const Dual<V, N>& b) {             \
    return value_of(a) op value_of(b);                                     \
  }                                                                        \
  template <class V, int N>                                                \
  bool operator op(const Dual<V, N>& a, double b) {                        \
    return value_of(a) op b;                                               \
  }                                                                        \
  template <class V, int N>                                                \
  bool operator op(double a, const Dual<V, N>& b) {                        \
    return a op value_of(b);                                               \
  }
PLASTOKIT_DUAL_CMP(<)
PLASTOKIT_DUAL_CMP(>)
PLASTOKIT_DUAL_CMP(<=)
PLASTOKIT_DUAL_CMP(>=)
#undef PLASTOKIT_DUAL_CMP

namespace detail {
// f(a) with f'(a) = slope.
template <class V, int N>
Dual<V, N> chain(const Dual<V, N>& a, const V& f, const V& slope) {
  Dual<V, N> r;
  r.val = f;
  for (int i = 0; i < N; ++i) r.d[i] = slope * a.d[i];
  return r;
}
}  // namespace detail

template <class V, int N>
Dual<V, N> exp(const Dual<V, N>& a) {
  using std::exp;
  const V e = exp(a.val);
  return detail::chain(a, e, e);
}

template <class V, int N>
Dual<V, N> log(const Dual<V, N>& a) {
  using std::log;
  return detail::chain(a, V(log(a.val)), V(1.0 / a.val));
}

template <class V, int N>
Dual<V, N> log1p(const Dual<V, N>& a) {
  using std::log1p;
  return detail::chain(a, V(log1p(a.val)), V(1.0 / (1.0 + a.val)));
}

template <class V, int N>
Dual<V, N> sqrt(const Dual<V, N>& a) {
  using std::sqrt;
  const V s = sqrt(a.val);
  return detail::chain(a, s, V(0.5 / s));
}

template <class V, int N>
Dual<V, N> pow(const Dual<V, N>& a, double e) {
  using std::pow;
  return detail::chain(a, V(pow(a.val, e)), V(e * pow(a.val, e - 1.0)));
}

template <class V, int N>
Dual<V, N> pow(const Dual<V, N>& a, const Dual<V, N>& e) {
  return exp(e * log(a));
}

template <class V, int N>
Dual<V, N> abs(const Dual<V, N>& a) {
  return value_of(a) < 0.0 ? -a : a;
}

template <class V, int N>
bool isfinite(const Dual<V, N>& a) {
  using std::isfinite;
  if (!isfinite(a.val)) return false;
  for (const auto& g : a.d)
    if (!isfinite(g)) return false;
  return true;
}

}  // namespace plastokit
