#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "plastokit/nets.hpp"

using namespace plastokit;

TEST_CASE("parameterized softplus") {
  CHECK(softplus_param(0.0, 1.0) == doctest::Approx(std::log(2.0)));
  CHECK(softplus_param(0.0, 2.0) == doctest::Approx(0.5 * std::log(3.0)));
  // (1/beta) log(1 + beta e^x) approaches (x + log beta) / beta.
  for (double beta : {0.5, 1.0, 3.0}) {
    const double x = 800.0;
    CHECK(softplus_param(x, beta) == doctest::Approx((x + std::log(beta)) / beta).epsilon(1e-15));
  }
  CHECK(softplus_param(50.0, 1.0) == doctest::Approx(50.0));
  CHECK(std::isfinite(softplus_param(1e6, 1.0)));
}

TEST_CASE("parameterized logistic") {
  CHECK(logistic_param(0.7, 3.0, 0.7) == doctest::Approx(0.5));
  CHECK(logistic_param(1e4, 1.0, 2.0) == doctest::Approx(1.0));
  CHECK(logistic_param(1.0, 1.0, 0.0) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  CHECK(logistic_param(-1e4, 1.0, 2.0) >= 0.0);
}

TEST_CASE("activation derivatives match finite differences and keep their signs") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(0.0, 20.0);
  std::uniform_real_distribution<double> ub(0.05, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = ux(rng);
    const double b = ub(rng), b2 = ub(rng);
    const double h = 1e-6 * std::max(1.0, x);
    const Eval3<double> sp = softplus_param3(x, b);
    const Eval3<double> spp = softplus_param3(x + h, b), spm = softplus_param3(x - h, b);
    CHECK(sp.v >= 0.0);
    CHECK(sp.d1 >= 0.0);
    CHECK(sp.d2 >= 0.0);
    CHECK(std::abs((spp.v - spm.v) / (2 * h) - sp.d1) < 1e-6 * std::max(1.0, sp.d1));
    CHECK(std::abs((spp.d1 - spm.d1) / (2 * h) - sp.d2) < 1e-6 * std::max(1.0, sp.d2));

    const Eval3<double> lg = logistic_param3(x, b, b2);
    const Eval3<double> lgp = logistic_param3(x + h, b, b2), lgm = logistic_param3(x - h, b, b2);
    CHECK(lg.v >= 0.0);
    CHECK(lg.d1 >= 0.0);
    CHECK(std::abs((lgp.v - lgm.v) / (2 * h) - lg.d1) < 1e-6 * std::max(1.0, lg.d1));
    CHECK(std::abs((lgp.d1 - lgm.d1) / (2 * h) - lg.d2) < 1e-6 * std::max(1.0, std::abs(lg.d2)));
  }
}

TEST_CASE("forward pass of hand-built nets") {
  ConstrainedNet zero(Flavor::Positive, Activation::Softplus, {1, 4, 1});
  auto& pz = zero.params();
  for (int k = zero.activation_offset(0); k < zero.num_params(); ++k) pz[static_cast<std::size_t>(k)] = 1.0;
  pz[static_cast<std::size_t>(zero.output_bias_index())] = 0.25;
  CHECK(zero.forward(3.0) == doctest::Approx(0.25));

  ConstrainedNet one(Flavor::Positive, Activation::Softplus, {1, 1, 1});
  one.set_params({1.0, 0.0, 1.0, 0.0, 1.0});
  // W1 = 1, b1 = 0, W2 = 1, b2 = 0, beta = 1.
  CHECK(one.forward(0.0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("input derivatives of a net match finite differences") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (Flavor fl : {Flavor::PositiveMonotone, Flavor::PositiveMonotoneConvex}) {
      const ConstrainedNet net = init_net(fl, seed, {1, 10, 1}, default_activation(fl));
      for (double x : {0.0, 0.3, 2.0, 7.5}) {
        const double h = 1e-5;
        const Eval3<double> e = net.forward3(x);
        const Eval3<double> ep = net.forward3(x + h), em = net.forward3(x - h);
        CHECK(std::abs((ep.v - em.v) / (2 * h) - e.d1) < 1e-6 * std::max(1.0, std::abs(e.d1)));
        CHECK(std::abs((ep.d1 - em.d1) / (2 * h) - e.d2) < 1e-6 * std::max(1.0, std::abs(e.d2)));
      }
    }
  }
}

TEST_CASE("initialization") {
  const ConstrainedNet a = init_net(Flavor::PositiveMonotoneConvex, 42);
  const ConstrainedNet b = init_net(Flavor::PositiveMonotoneConvex, 42);
  const ConstrainedNet c = init_net(Flavor::PositiveMonotoneConvex, 43);
  CHECK(a.params() == b.params());
  CHECK(a.params() != c.params());
  CHECK(a.weights_nonnegative());
  for (double v : a.params()) CHECK(v >= 0.0);
  // Fan-in of the hidden layer is 1, of the output layer 10.
  for (int k = a.weight_offset(1); k < a.bias_offset(1); ++k)
    CHECK(a.params()[static_cast<std::size_t>(k)] <= 1.0 / std::sqrt(10.0));
}

TEST_CASE("monotone nets are monotone") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    ConstrainedNet net = init_net(Flavor::PositiveMonotone, 1000 + static_cast<std::uint64_t>(trial), {1, 10, 1},
                                  Activation::Logistic);
    for (auto& v : net.params()) v = u(rng);
    CHECK(net.forward(2.0) >= net.forward(1.0));
  }
}

TEST_CASE("isotropic hardening function") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    IsotropicHardeningNet h = make_isotropic_net(seed);
    CHECK(R_of_r(h, 0.0) == 1.0);
    CHECK(R_of_r(h, 1.0) <= R_of_r(h, 0.0));
    for (double r : {0.0, 1e-3, 0.01, 0.2, 3.0}) {
      const double hh = 1e-6 * std::max(1e-3, r);
      const double fd = (R_of_r(h, r + hh) - R_of_r(h, std::max(0.0, r - hh))) / (r > hh ? 2 * hh : hh);
      CHECK(dR_dr(h, r) <= 0.0);
      CHECK(R_of_r(h, r) > 0.0);
      CHECK(std::abs(fd - dR_dr(h, r)) < 1e-6 * std::max(1.0, std::abs(dR_dr(h, r))) + (r > hh ? 0.0 : 1e-3 * std::abs(dR_dr(h, r))));
    }
  }
}

TEST_CASE("kinematic potential") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const KinematicHardeningNet k = make_kinematic_net(seed);
    CHECK(phi_of_xn(k, 0.0) == 0.0);
    const double a = u(rng), b = u(rng);
    CHECK(phi_of_xn(k, 0.5 * a + 0.5 * b) <= 0.5 * phi_of_xn(k, a) + 0.5 * phi_of_xn(k, b) + 1e-10);
    CHECK(dphi(k, a) >= 0.0);
    const double h = 1e-6 * std::max(1.0, a);
    const double fd = (phi_of_xn(k, a + h) - phi_of_xn(k, a - h)) / (2 * h);
    CHECK(std::abs(fd - dphi(k, a)) < 1e-6 * std::max(1.0, dphi(k, a)));
  }
}

TEST_CASE("projection restores the constraints") {
  ConstrainedNet net = init_net(Flavor::PositiveMonotoneConvex, 3);
  for (auto& v : net.params()) v = -v;
  net.project();
  CHECK(net.weights_nonnegative());
  for (int k = net.activation_offset(0); k < net.num_params(); ++k)
    CHECK(net.params()[static_cast<std::size_t>(k)] >= 1e-6);

  ConstrainedNet free = init_net(Flavor::Unconstrained, 3);
  for (auto& v : free.params()) v = -v;
  free.project();
  CHECK_FALSE(free.weights_nonnegative());
}

TEST_CASE("JSON round trip is bit-stable") {
  IsotropicHardeningNet h = make_isotropic_net(17);
  for (auto& v : h.net.params()) v *= 1.0 / 3.0;
  const std::string text = h.net.to_json().dump();
  const ConstrainedNet back = ConstrainedNet::from_json(nlohmann::json::parse(text));
  CHECK(back.params() == h.net.params());
  CHECK(back.widths() == h.net.widths());
  CHECK(back.flavor() == h.net.flavor());
  CHECK(back.activation() == h.net.activation());
  CHECK_THROWS_AS(ConstrainedNet::from_json(nlohmann::json::parse("{\"flavor\": \"x\"}")), ParseError);
}
