#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "plastokit/fem.hpp"

using namespace plastokit;

namespace {

const ElasticParams kEl{200000.0, 0.3};

std::unique_ptr<Material> elastic_material() {
  SingleNlkParams p = SingleNlkParams::table2();
  p.sigma_y = 1e12;
  return make_material(p);
}

Eigen::VectorXd affine(const Mesh& m, const Eigen::Matrix3d& A, const Eigen::Vector3d& c) {
  Eigen::VectorXd u(3 * m.num_nodes());
  for (int n = 0; n < m.num_nodes(); ++n) {
    const auto& x = m.nodes[static_cast<std::size_t>(n)];
    u.segment<3>(3 * n) = A * Eigen::Vector3d(x[0], x[1], x[2]) + c;
  }
  return u;
}

}  // namespace

TEST_CASE("mesh construction") {
  const Mesh b = Mesh::box(2, 3, 4, 1.0, 2.0, 3.0);
  CHECK(b.num_nodes() == 3 * 4 * 5);
  CHECK(b.num_elements() == 24);
  const Mesh c = Mesh::cook(8, 8, 1);
  CHECK(c.nodes[8][0] == doctest::Approx(48.0));
  CHECK(c.nodes[8][1] == doctest::Approx(44.0));
  CHECK(c.nodes[80][1] == doctest::Approx(60.0));
  CHECK(c.nodes[72][1] == doctest::Approx(44.0));
  Mesh bad = b;
  bad.hexes[0][3] = 1000;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK_THROWS_AS(Mesh::box(0, 1, 1, 1, 1, 1), InvalidArgument);

  Mesh flipped = Mesh::box(1, 1, 1, 1.0, 1.0, 1.0);
  std::swap(flipped.hexes[0][1], flipped.hexes[0][3]);
  std::swap(flipped.hexes[0][5], flipped.hexes[0][7]);
  const auto mat = elastic_material();
  CHECK_THROWS_AS(FemModel(flipped, *mat), InvalidArgument);
}

TEST_CASE("strain-free motions produce no internal force") {
  const auto mat = elastic_material();
  const FemModel model(Mesh::box(2, 2, 2, 1.0, 1.0, 1.0), *mat);
  const auto zero = model.assemble(Eigen::VectorXd::Zero(model.num_dofs()), true);
  CHECK(zero.f_int.norm() == 0.0);
  const auto shift = model.assemble(affine(model.mesh(), Eigen::Matrix3d::Zero(), {0.1, -0.2, 0.3}), false);
  CHECK(shift.f_int.norm() < 1e-9);
  // Small rotation: the skew part of the gradient carries no strain.
  Eigen::Matrix3d W;
  W << 0, -1e-4, 2e-4, 1e-4, 0, -3e-4, -2e-4, 3e-4, 0;
  const auto rot = model.assemble(affine(model.mesh(), W, Eigen::Vector3d::Zero()), false);
  CHECK(rot.f_int.norm() < 1e-9);
}

TEST_CASE("single element under uniaxial stress") {
  const auto mat = elastic_material();
  const FemModel model(Mesh::box(1, 1, 1, 1.0, 1.0, 1.0), *mat);
  const double e = 4e-4;
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  A(0, 0) = e;
  A(1, 1) = A(2, 2) = -kEl.nu * e;
  const Eigen::VectorXd u = affine(model.mesh(), A, Eigen::Vector3d::Zero());
  const auto a = model.assemble(u, true);
  // sigma11 = E e on the unit face x = 1, nothing else.
  double fx1 = 0.0;
  for (int n = 0; n < 8; ++n) {
    const auto& x = model.mesh().nodes[static_cast<std::size_t>(n)];
    if (x[0] > 0.5) fx1 += a.f_int(3 * n);
    CHECK(std::abs(a.f_int(3 * n + 1)) < 1e-8);
    CHECK(std::abs(a.f_int(3 * n + 2)) < 1e-8);
  }
  CHECK(fx1 == doctest::Approx(kEl.E * e).epsilon(1e-8));
  CHECK((a.K * u - a.f_int).norm() <= 1e-8 * a.f_int.norm());
  CHECK((a.K - a.K.transpose()).norm() <= 1e-10 * a.K.norm());
}

TEST_CASE("patch test on a distorted mesh") {
  Mesh m = Mesh::box(2, 2, 2, 1.0, 1.0, 1.0);
  const int centre = 1 + 3 * (1 + 3 * 1);
  m.nodes[static_cast<std::size_t>(centre)] = {0.42, 0.57, 0.61};
  const auto mat = elastic_material();
  const FemModel model(m, *mat);
  Eigen::Matrix3d A;
  A << 3e-4, 1e-4, -2e-4, 0.5e-4, -1e-4, 2.5e-4, 1e-4, 0.0, 2e-4;
  const Eigen::VectorXd exact = affine(m, A, {1e-3, 0.0, -2e-3});
  Eigen::VectorXd u = exact;
  u.segment<3>(3 * centre).setZero();
  const auto a = model.assemble(u, true);
  const Eigen::Matrix3d Kc = a.K.block<3, 3>(3 * centre, 3 * centre);
  u.segment<3>(3 * centre) -= Kc.lu().solve(a.f_int.segment<3>(3 * centre));
  CHECK((u - exact).norm() <= 1e-10 * exact.norm());
  const auto b = model.assemble(u, false);
  const SymTensor3 expected{A(0, 0), A(1, 1), A(2, 2), 0.5 * (A(0, 1) + A(1, 0)), 0.5 * (A(0, 2) + A(2, 0)),
                            0.5 * (A(1, 2) + A(2, 1))};
  for (const SymTensor3& e : b.eps)
    for (int i = 0; i < 6; ++i) CHECK(e.c[i] == doctest::Approx(expected.c[i]).epsilon(1e-9));
}

TEST_CASE("elastic benchmarks are linear") {
  const auto mat = elastic_material();
  FemConfig cfg = FemConfig::defaults(Benchmark::Punch);
  cfg.divisions = {2, 2, 2};
  cfg.u0 = 1e-5;
  const FemResult r = run_benchmark(cfg, *mat);
  for (int it : r.iterations) CHECK(it <= 2);
  CHECK(r.relres[0].front() == 1.0);
  // Whole-face compression: homogeneous uniaxial stress.
  const double sig = kEl.E * cfg.u0;
  CHECK(r.probe.back().stress_norm == doctest::Approx(sig).epsilon(1e-8));
  CHECK(r.u(3 * 26 + 2) == doctest::Approx(-cfg.u0));
  CHECK(r.u(3 * 26) == doctest::Approx(kEl.nu * cfg.u0).epsilon(1e-8));

  FemConfig cook = FemConfig::defaults(Benchmark::Cook);
  cook.divisions = {4, 4, 1};
  cook.u0 = 1e-3;
  const auto curve = cook_summary(run_benchmark(cook, *mat));
  REQUIRE(curve.size() == 10u);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].strain_norm == doctest::Approx(curve[9].strain_norm * (i + 1) / 10.0).epsilon(1e-8));
    CHECK(curve[i].stress_norm == doctest::Approx(curve[9].stress_norm * (i + 1) / 10.0).epsilon(1e-8));
  }

  cook.u0 = 0.0;
  const auto flat = cook_summary(run_benchmark(cook, *mat));
  for (const auto& s : flat) {
    CHECK(s.strain_norm == 0.0);
    CHECK(s.stress_norm == 0.0);
  }
}

TEST_CASE("plastic punch converges and dissipates") {
  const auto mat = make_material(SingleNlkParams::table2());
  FemConfig cfg = FemConfig::defaults(Benchmark::Punch);
  cfg.divisions = {2, 2, 2};
  cfg.punch_patch = 0.5;
  const FemResult r = run_benchmark(cfg, *mat);
  CHECK(r.iterations.size() == 10u);
  for (int it : r.iterations) CHECK(it <= 12);
  for (std::size_t i = 0; i < r.dissipation.size(); ++i) {
    CHECK(r.dissipation[i] >= 0.0);
    if (i > 0) CHECK(r.dissipation[i] >= r.dissipation[i - 1] - 1e-12);
  }
  CHECK(r.dissipation.back() > 0.0);
  // Superlinear decay on the last plastic increment.
  const auto& h = r.relres.back();
  REQUIRE(h.size() >= 3);
  CHECK(h[h.size() - 1] / h[h.size() - 2] < h[h.size() - 2] / h[h.size() - 3]);

  cfg.max_iterations = 1;
  CHECK_THROWS_AS(run_benchmark(cfg, *mat), GlobalNoConvergence);
}
