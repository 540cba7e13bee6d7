#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace plastokit {

/// Symmetric second-order tensor stored by its six independent components in
/// the order 11, 22, 33, 12, 13, 23. Off-diagonal entries hold tensor (not
/// engineering) values, so a double contraction counts each of them twice.
template <class T>
struct SymTensor {
  std::array<T, 6> c{};

  static SymTensor zero() { return SymTensor{}; }

  static SymTensor identity() { return diag(T(1.0), T(1.0), T(1.0)); }

  static SymTensor diag(T a, T b, T d) {
    SymTensor t;
    t.c = {a, b, d, T(0.0), T(0.0), T(0.0)};
    return t;
  }

  static SymTensor from(const T* p) {
    SymTensor t;
    for (int i = 0; i < 6; ++i) t.c[i] = p[i];
    return t;
  }

  T& operator[](std::size_t i) { return c[i]; }
  const T& operator[](std::size_t i) const { return c[i]; }

  /// Full-index access, i and j in 0..2.
  const T& operator()(int i, int j) const { return c[full_to_voigt(i, j)]; }

  static constexpr std::size_t full_to_voigt(int i, int j) {
    if (i == j) return static_cast<std::size_t>(i);
    const int lo = i < j ? i : j;
    const int hi = i < j ? j : i;
    if (lo == 0) return hi == 1 ? 3 : 4;
    return 5;
  }

  SymTensor& operator+=(const SymTensor& o) {
    for (int i = 0; i < 6; ++i) c[i] += o.c[i];
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    for (int i = 0; i < 6; ++i) c[i] -= o.c[i];
    return *this;
  }
  template <class S>
  SymTensor& operator*=(const S& s) {
    for (int i = 0; i < 6; ++i) c[i] *= s;
    return *this;
  }
};

using SymTensor3 = SymTensor<double>;

/// Multiplicity of each stored component in a double contraction.
inline constexpr std::array<double, 6> kContractionWeight = {1.0, 1.0, 1.0, 2.0, 2.0, 2.0};

template <class T>
SymTensor<T> operator+(SymTensor<T> a, const SymTensor<T>& b) {
  return a += b;
}

template <class T>
SymTensor<T> operator-(SymTensor<T> a, const SymTensor<T>& b) {
  return a -= b;
}

template <class T>
SymTensor<T> operator-(SymTensor<T> a) {
  for (auto& v : a.c) v = -v;
  return a;
}

template <class T, class S>
SymTensor<T> operator*(SymTensor<T> a, const S& s) {
  for (auto& v : a.c) v = v * s;
  return a;
}

template <class T, class S>
SymTensor<T> operator*(const S& s, SymTensor<T> a) {
  for (auto& v : a.c) v = s * v;
  return a;
}

template <class T>
T trace(const SymTensor<T>& a) {
  return a.c[0] + a.c[1] + a.c[2];
}

/// A:B with off-diagonals counted twice.
template <class T>
T contract(const SymTensor<T>& a, const SymTensor<T>& b) {
  return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2] +
         2.0 * (a.c[3] * b.c[3] + a.c[4] * b.c[4] + a.c[5] * b.c[5]);
}

template <class T>
SymTensor<T> deviator(const SymTensor<T>& a) {
  SymTensor<T> d = a;
  const T p = trace(a) / 3.0;
  d.c[0] -= p;
  d.c[1] -= p;
  d.c[2] -= p;
  return d;
}

template <class T>
T frobenius_sq(const SymTensor<T>& a) {
  return contract(a, a);
}

/// sqrt(3/2 dev(A):dev(A)).
template <class T>
T vm_equivalent(const SymTensor<T>& a) {
  using std::sqrt;
  const auto d = deviator(a);
  return sqrt(1.5 * contract(d, d));
}

template <class T>
T determinant(const SymTensor<T>& a) {
  const T& a11 = a.c[0];
  const T& a22 = a.c[1];
  const T& a33 = a.c[2];
  const T& a12 = a.c[3];
  const T& a13 = a.c[4];
  const T& a23 = a.c[5];
  return a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
         a13 * (a12 * a23 - a22 * a13);
}

/// Converts between scalar types component-wise (e.g. double -> dual).
template <class To, class From>
SymTensor<To> tensor_cast(const SymTensor<From>& a) {
  SymTensor<To> t;
  for (int i = 0; i < 6; ++i) t.c[i] = To(a.c[i]);
  return t;
}

struct Invariants {
  double I1;
  double I2;
  double I3;
};

struct PiCoords {
  double p1;
  double p2;
  double p3;
};

using Principal = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

Invariants invariants(const SymTensor3& a);

/// Eigenvalues sorted descending. Cyclic Jacobi with a 50-sweep cap; throws
/// NumericalFailure if the off-diagonal mass does not vanish within the cap.
Principal principal_values(const SymTensor3& a);

/// The fixed orthogonal map from principal values to the deviatoric plane
/// (rows 1-2) and the hydrostatic axis (row 3).
const Mat3& pi_transform();

PiCoords pi_coords(const Principal& principal);

/// Full 3x3 representation, row-major.
Mat3 to_matrix(const SymTensor3& a);
SymTensor3 from_matrix(const Mat3& m);

}  // namespace plastokit
