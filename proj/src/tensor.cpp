#include "plastokit/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "plastokit/errors.hpp"

namespace plastokit {

Invariants invariants(const SymTensor3& a) {
  const double tr = trace(a);
  return {tr, 0.5 * (tr * tr - frobenius_sq(a)), determinant(a)};
}

Mat3 to_matrix(const SymTensor3& a) {
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = a(i, j);
  return m;
}

SymTensor3 from_matrix(const Mat3& m) {
  SymTensor3 t;
  t.c = {m[0][0], m[1][1], m[2][2], 0.5 * (m[0][1] + m[1][0]), 0.5 * (m[0][2] + m[2][0]),
         0.5 * (m[1][2] + m[2][1])};
  return t;
}

Principal principal_values(const SymTensor3& a) {
  constexpr int kMaxSweeps = 50;
  Mat3 m = to_matrix(a);

  double scale = 0.0;
  for (const auto& row : m)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return {0.0, 0.0, 0.0};

  auto off_norm = [&m] {
    return m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  };

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_norm() <= 1e-30 * scale * scale) {
      converged = true;
      break;
    }
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        const double apq = m[p][q];
        if (apq == 0.0) continue;
        const double theta = (m[q][q] - m[p][p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        // A <- J^T A J for the rotation in the (p, q) plane.
        for (int k = 0; k < 3; ++k) {
          const double akp = m[k][p];
          const double akq = m[k][q];
          m[k][p] = cs * akp - sn * akq;
          m[k][q] = sn * akp + cs * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = m[p][k];
          const double aqk = m[q][k];
          m[p][k] = cs * apk - sn * aqk;
          m[q][k] = sn * apk + cs * aqk;
        }
      }
    }
  }
  if (!converged && off_norm() > 1e-24 * scale * scale)
    throw NumericalFailure("principal_values: Jacobi sweeps did not converge");

  Principal ev = {m[0][0], m[1][1], m[2][2]};
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

const Mat3& pi_transform() {
  static const Mat3 kT = [] {
    const double s23 = std::sqrt(2.0 / 3.0);
    const double s16 = std::sqrt(1.0 / 6.0);
    const double s12 = std::sqrt(0.5);
    const double s13 = std::sqrt(1.0 / 3.0);
    return Mat3{{{s23, -s16, -s16}, {0.0, s12, -s12}, {s13, s13, s13}}};
  }();
  return kT;
}

PiCoords pi_coords(const Principal& s) {
  const Mat3& t = pi_transform();
  double out[3];
  for (int i = 0; i < 3; ++i) out[i] = t[i][0] * s[0] + t[i][1] * s[1] + t[i][2] * s[2];
  return {out[0], out[1], out[2]};
}

}  // namespace plastokit
