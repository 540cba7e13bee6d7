#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "plastokit/tensor.hpp"

using namespace plastokit;

namespace {

SymTensor3 random_tensor(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SymTensor3 t;
  for (auto& v : t.c) v = u(rng);
  return t;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  // Rodrigues formula on a random axis and angle.
  std::normal_distribution<double> g(0.0, 1.0);
  double k[3] = {g(rng), g(rng), g(rng)};
  const double nk = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
  for (double& v : k) v /= nk;
  std::uniform_real_distribution<double> ua(0.0, 2.0 * M_PI);
  const double th = ua(rng);
  const double c = std::cos(th), s = std::sin(th);
  const double K[3][3] = {{0, -k[2], k[1]}, {k[2], 0, -k[0]}, {-k[1], k[0], 0}};
  Mat3 q{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double kk = 0.0;
      for (int m = 0; m < 3; ++m) kk += K[i][m] * K[m][j];
      q[i][j] = (i == j ? 1.0 : 0.0) + s * K[i][j] + (1.0 - c) * kk;
    }
  return q;
}

Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int m = 0; m < 3; ++m) c[i][j] += a[i][m] * b[m][j];
  return c;
}

Mat3 transpose(const Mat3& a) {
  Mat3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = a[j][i];
  return t;
}

}  // namespace

TEST_CASE("invariants of simple tensors") {
  const Invariants id = invariants(SymTensor3::identity());
  CHECK(id.I1 == doctest::Approx(3.0));
  CHECK(id.I2 == doctest::Approx(3.0));
  CHECK(id.I3 == doctest::Approx(1.0));

  const Invariants z = invariants(SymTensor3::zero());
  CHECK(z.I1 == 0.0);
  CHECK(z.I2 == 0.0);
  CHECK(z.I3 == 0.0);

  // det(lambda I - diag(1,2,3)) = lambda^3 - 6 lambda^2 + 11 lambda - 6.
  const Invariants d = invariants(SymTensor3::diag(1.0, 2.0, 3.0));
  CHECK(d.I1 == doctest::Approx(6.0));
  CHECK(d.I2 == doctest::Approx(11.0));
  CHECK(d.I3 == doctest::Approx(6.0));
}

TEST_CASE("pi coordinates") {
  const double p = 2.5;
  const PiCoords h = pi_coords({p, p, p});
  CHECK(std::abs(h.p1) < 1e-14);
  CHECK(std::abs(h.p2) < 1e-14);
  CHECK(h.p3 == doctest::Approx(std::sqrt(3.0) * p));

  const double s = 3.0;
  const PiCoords u = pi_coords({s, 0.0, 0.0});
  CHECK(u.p1 == doctest::Approx(std::sqrt(2.0 / 3.0) * s));
  CHECK(std::abs(u.p2) < 1e-15);
  CHECK(u.p3 == doctest::Approx(s / std::sqrt(3.0)));

  const PiCoords zero = pi_coords({0.0, 0.0, 0.0});
  CHECK(zero.p1 == 0.0);
  CHECK(zero.p2 == 0.0);
  CHECK(zero.p3 == 0.0);
}

TEST_CASE("pi transform is orthogonal") {
  const Mat3& t = pi_transform();
  const Mat3 ttt = mul(t, transpose(t));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(ttt[i][j] - (i == j ? 1.0 : 0.0)) < 1e-14);
}

TEST_CASE("principal values") {
  const Principal a = principal_values(SymTensor3::diag(3.0, 1.0, 2.0));
  CHECK(a[0] == doctest::Approx(3.0));
  CHECK(a[1] == doctest::Approx(2.0));
  CHECK(a[2] == doctest::Approx(1.0));

  const Principal b = principal_values(SymTensor3::identity());
  for (double v : b) CHECK(v == doctest::Approx(1.0));

  SymTensor3 shear;
  shear[3] = 1.0;
  const Principal c = principal_values(shear);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(std::abs(c[1]) < 1e-14);
  CHECK(c[2] == doctest::Approx(-1.0));
}

TEST_CASE("principal values reproduce the invariants") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const SymTensor3 a = random_tensor(rng, 100.0);
    const Principal p = principal_values(a);
    const Invariants inv = invariants(a);
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(inv.I1).epsilon(1e-10).scale(100.0));
    CHECK(p[0] * p[1] + p[1] * p[2] + p[0] * p[2] == doctest::Approx(inv.I2).epsilon(1e-10).scale(1e4));
    CHECK(p[0] * p[1] * p[2] == doctest::Approx(inv.I3).epsilon(1e-10).scale(1e6));
    CHECK(p[0] >= p[1]);
    CHECK(p[1] >= p[2]);
  }
}

TEST_CASE("deviator, norm and von Mises equivalent") {
  const double s = -4.0;
  CHECK(vm_equivalent(SymTensor3::diag(s, 0.0, 0.0)) == doctest::Approx(std::abs(s)));
  CHECK(frobenius_sq(SymTensor3::identity()) == doctest::Approx(3.0));
  const SymTensor3 d = deviator(SymTensor3::identity() * 7.0);
  for (double v : d.c) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("contraction matches the full 3x3 double sum") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const SymTensor3 a = random_tensor(rng);
    const SymTensor3 b = random_tensor(rng);
    const Mat3 am = to_matrix(a), bm = to_matrix(b);
    double full = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) full += am[i][j] * bm[i][j];
    CHECK(contract(a, b) == doctest::Approx(full).epsilon(1e-14));
  }
}

TEST_CASE("von Mises equivalent through the pi plane") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const SymTensor3 a = random_tensor(rng, 300.0);
    const PiCoords pc = pi_coords(principal_values(a));
    const double via_pi = std::sqrt(1.5) * std::sqrt(pc.p1 * pc.p1 + pc.p2 * pc.p2);
    CHECK(via_pi == doctest::Approx(vm_equivalent(a)).epsilon(1e-10));
  }
}

TEST_CASE("invariants are rotation invariant") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const SymTensor3 a = random_tensor(rng, 10.0);
    const Mat3 q = random_rotation(rng);
    const SymTensor3 rotated = from_matrix(mul(mul(q, to_matrix(a)), transpose(q)));
    const Invariants i0 = invariants(a);
    const Invariants i1 = invariants(rotated);
    CHECK(std::abs(i0.I1 - i1.I1) < 1e-9 * std::max(1.0, std::abs(i0.I1)));
    CHECK(std::abs(i0.I2 - i1.I2) < 1e-9 * std::max(1.0, std::abs(i0.I2)));
    CHECK(std::abs(i0.I3 - i1.I3) < 1e-9 * std::max(1.0, std::abs(i0.I3)));
  }
}
