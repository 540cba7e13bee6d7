#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "plastokit/dataset.hpp"
#include "plastokit/material.hpp"
#include "plastokit/return_map.hpp"

using namespace plastokit;

namespace {

void zero_weights(ConstrainedNet& net) {
  for (int k = 0; k < net.num_params(); ++k)
    if (net.is_weight_or_bias(k)) net.params()[static_cast<std::size_t>(k)] = 0.0;
  net.params()[static_cast<std::size_t>(net.output_bias_index())] = 1.0;
}

// R = 1 and phi = 0: linear kinematic hardening with modulus C.
SurrogateModel linear_kinematic(const ElasticParams& el, double sy, double C) {
  SurrogateModel m = make_surrogate(el, sy, 1);
  zero_weights(m.iso.net);
  zero_weights(m.kin.net);
  m.C = C;
  return m;
}

MaterialState uniaxial_prestrain(const SurrogateModel& m, double eps) {
  MaterialState st;
  const int n = 10;
  for (int i = 1; i <= n; ++i) st = integrate_uniaxial(st, eps * i / n, m).state;
  return st;
}

// phi(y) = a y to round-off: one softplus unit far in its linear regime.
void linear_phi(KinematicHardeningNet& k, double a) {
  ConstrainedNet& net = k.net;
  for (int i = 0; i < net.num_params(); ++i)
    if (net.is_weight_or_bias(i)) net.params()[static_cast<std::size_t>(i)] = 0.0;
  net.params()[static_cast<std::size_t>(net.weight_offset(0))] = 1.0;
  net.params()[static_cast<std::size_t>(net.bias_offset(0))] = 40.0;
  net.params()[static_cast<std::size_t>(net.weight_offset(1))] = 1.0;
  const double slope = k.dphi(0.0);
  net.params()[static_cast<std::size_t>(net.weight_offset(1))] = a / slope;
}

// Uniaxial reduction of the surrogate with R = 1 and phi = a X:X; x is the 11
// entry of the deviatoric backstress.
std::vector<double> af_oracle(double E, double sy, double C, double a, const std::vector<double>& path, int sub) {
  double sig = 0.0, x = 0.0, eps = 0.0;
  std::vector<double> out;
  for (double target : path) {
    const double de = (target - eps) / sub;
    for (int k = 0; k < sub; ++k) {
      const double trial = sig + E * de;
      const double f = std::abs(trial - 1.5 * x) - sy;
      if (f <= 0.0) {
        sig = trial;
        continue;
      }
      const double s = trial - 1.5 * x > 0.0 ? 1.0 : -1.0;
      const double h = 1.5 * (2.0 * C - 4.0 * C * a * x * s);
      const double dl = f / (E + h);
      sig = trial - E * s * dl;
      x += (2.0 * C * s - 4.0 * C * a * x) * dl;
    }
    eps = target;
    out.push_back(sig);
  }
  return out;
}

}  // namespace

TEST_CASE("elastic steps leave the internal variables untouched") {
  const SurrogateModel m = make_surrogate({200000.0, 0.3}, 207.0, 3);
  const MaterialState s0;
  const StrainStepResult z = integrate_strain_controlled(s0, SymTensor3::zero(), m);
  CHECK_FALSE(z.inc.plastic);
  for (double v : z.sigma.c) CHECK(v == 0.0);

  const SymTensor3 de = SymTensor3::diag(5e-4, -1.5e-4, -1.5e-4);
  const StrainStepResult e = integrate_strain_controlled(s0, de, m);
  CHECK_FALSE(e.inc.plastic);
  CHECK(e.inc.dlambda == 0.0);
  CHECK(e.state.r == 0.0);
  for (double v : e.state.X.c) CHECK(v == 0.0);
  for (double v : e.state.eps_p.c) CHECK(v == 0.0);
  CHECK(e.sigma[0] == doctest::Approx(elastic_stress(de, m.elastic)[0]));
}

TEST_CASE("uniaxial yield onset") {
  const SurrogateModel m = make_surrogate({200000.0, 0.3}, 207.0, 5);
  const double onset = 207.0 / 200000.0;
  CHECK(onset == doctest::Approx(1.035e-3));
  const UniaxialStepResult below = integrate_uniaxial(MaterialState{}, 0.999 * onset, m);
  CHECK_FALSE(below.inc.plastic);
  CHECK(below.sigma11 == doctest::Approx(0.999 * 207.0));
  const UniaxialStepResult above = integrate_uniaxial(MaterialState{}, 1.5 * onset, m);
  CHECK(above.inc.plastic);
  CHECK(above.sigma11 > 207.0 * 0.99);
  CHECK(above.sigma11 < 1.5 * 207.0);
}

TEST_CASE("uniaxial steps keep the off-axis stresses at zero") {
  const SurrogateModel m = make_surrogate({200000.0, 0.3}, 207.0, 11);
  MaterialState st;
  for (int i = 1; i <= 40; ++i) {
    const UniaxialStepResult res = integrate_uniaxial(st, 1e-4 * i, m);
    for (int c = 1; c < 6; ++c) CHECK(std::abs(res.sigma[static_cast<std::size_t>(c)]) < 1e-8);
    CHECK(res.state.eps_e[0] + res.state.eps_p[0] == doctest::Approx(1e-4 * i).epsilon(1e-12));
    st = res.state;
  }
}

TEST_CASE("linear kinematic hardening matches the closed form") {
  const ElasticParams el{212000.0, 0.26};
  const double s0 = 208.0, C = 5000.0;
  const SurrogateModel m = linear_kinematic(el, s0, C);
  // sigma = s0 + 3 C eps_p and eps = sigma / E + eps_p on monotonic loading.
  const double H = 3.0 * C;
  MaterialState st;
  for (int i = 1; i <= 50; ++i) {
    const double eps = 2e-4 * i;
    const UniaxialStepResult res = integrate_uniaxial(st, eps, m);
    const double expected = eps * el.E <= s0 ? eps * el.E : (s0 + H * eps) / (1.0 + H / el.E);
    CHECK(res.sigma11 == doctest::Approx(expected).epsilon(1e-10));
    st = res.state;
  }
  // Reverse loading: the elastic range is 2 s0 wide, centred on 1.5 X11.
  const double eps_top = 0.01;
  const double sig_top = (s0 + H * eps_top) / (1.0 + H / el.E);
  const double eps_rev = eps_top - 2.0 * s0 / el.E - 0.002;
  const UniaxialStepResult rev = integrate_uniaxial(st, eps_rev, m);
  // Plastic strain decreases by dp with sig_top - 2 s0 - H dp = E (eps_rev - eps_p_top + dp).
  const double ep_top = eps_top - sig_top / el.E;
  const double dp = (sig_top - 2.0 * s0 - el.E * (eps_rev - ep_top)) / (H + el.E);
  CHECK(rev.sigma11 == doctest::Approx(sig_top - 2.0 * s0 - H * dp).epsilon(1e-10));
}

TEST_CASE("consistent tangent matches finite differences") {
  const SurrogateModel m = make_surrogate({200000.0, 0.3}, 207.0, 21, true, 5.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e-4, 1e-4);
  const MaterialState base = uniaxial_prestrain(m, 3e-3);
  for (int trial = 0; trial < 5; ++trial) {
    SymTensor3 de = SymTensor3::diag(2e-4, -6e-5, -6e-5);
    for (auto& v : de.c) v += u(rng);
    const StrainStepResult res = integrate_strain_controlled(base, de, m, true);
    REQUIRE(res.inc.plastic);
    for (int j = 0; j < 6; ++j) {
      const double h = 1e-9;
      SymTensor3 dp = de, dm = de;
      dp[static_cast<std::size_t>(j)] += h;
      dm[static_cast<std::size_t>(j)] -= h;
      const SymTensor3 sp = integrate_strain_controlled(base, dp, m).sigma;
      const SymTensor3 sm = integrate_strain_controlled(base, dm, m).sigma;
      for (int i = 0; i < 6; ++i) {
        const double fd = (sp[static_cast<std::size_t>(i)] - sm[static_cast<std::size_t>(i)]) / (2.0 * h);
        CHECK(std::abs(fd - res.tangent(i, j)) <= 1e-4 * std::max(1e3, std::abs(res.tangent(i, j))));
      }
    }
  }
}

TEST_CASE("tangent is symmetric without nonlinear kinematic hardening") {
  SurrogateModel m = make_surrogate({200000.0, 0.3}, 207.0, 8, true, 50.0);
  zero_weights(m.kin.net);
  zero_weights(m.iso.net);
  const MaterialState base = uniaxial_prestrain(m, 3e-3);
  const SymTensor3 de{{3e-4, -1e-4, -5e-5, 4e-5, -2e-5, 1e-5}};
  const Mat6 t = consistent_tangent(base, de, m);
  // In stored components the shear columns act on tensor shear, so weight them.
  Mat6 w = t;
  for (int j = 3; j < 6; ++j) w.col(j) *= 0.5;
  CHECK((w - w.transpose()).cwiseAbs().maxCoeff() <= 1e-8 * w.cwiseAbs().maxCoeff());
}

TEST_CASE("dissipation is non-negative along a cyclic path") {
  for (std::uint64_t seed : {2u, 9u, 30u}) {
    const SurrogateModel m = make_surrogate({200000.0, 0.3}, 207.0, seed, true, 20.0);
    MaterialState st;
    double eps = 0.0;
    const double steps[][2] = {{0.0125, 125}, {-0.0125, 250}, {0.0125, 250}};
    for (const auto& seg : steps) {
      for (int i = 0; i < static_cast<int>(seg[1]); ++i) {
        eps += seg[0] / 125.0;
        const UniaxialStepResult res = integrate_uniaxial(st, eps, m);
        const double d = dissipation_increment(st, res.state, res.sigma, res.inc.dlambda, m);
        CHECK(d >= -1e-9 * 207.0 * std::max(1e-6, res.inc.dlambda));
        CHECK(res.inc.dlambda >= 0.0);
        st = res.state;
      }
    }
  }
}

TEST_CASE("step adjoint matches finite differences") {
  const SurrogateModel m = make_surrogate({200000.0, 0.3}, 207.0, 13, true, 10.0);
  const MaterialState base = uniaxial_prestrain(m, 2e-3);
  const SurrogateKernel k(m);
  const auto s = pack_state(base);
  const auto th = m.theta();
  const std::array<double, 6> load{2.4e-3, 0.0, 0.0, 0.0, 0.0, 0.0};

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<double, SurrogateKernel::kState> w{};
  for (auto& v : w) v = u(rng);
  auto objective = [&](const std::array<double, SurrogateKernel::kState>& sv, const std::vector<double>& tv) {
    const auto out = solve_step(k, Control::Uniaxial, sv.data(), tv.data(), load.data());
    double acc = 0.0;
    for (int i = 0; i < SurrogateKernel::kState; ++i) acc += w[static_cast<std::size_t>(i)] * out.state[static_cast<std::size_t>(i)];
    return acc;
  };

  const auto out = solve_step(k, Control::Uniaxial, s.data(), th.data(), load.data());
  REQUIRE(out.info.plastic);
  std::array<double, SurrogateKernel::kState> s_bar{};
  std::vector<double> th_bar(th.size(), 0.0);
  step_adjoint(k, Control::Uniaxial, s.data(), th.data(), load.data(), out, w.data(), s_bar.data(), th_bar.data());

  for (std::size_t j = 0; j < th.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(th[j]));
    auto tp = th, tm = th;
    tp[j] += h;
    tm[j] -= h;
    const double fd = (objective(s, tp) - objective(s, tm)) / (2.0 * h);
    CHECK(std::abs(fd - th_bar[j]) <= 1e-5 * std::max(1e-3, std::abs(fd)));
  }
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double h = 1e-9 * std::max(1.0, std::abs(s[j]));
    auto sp = s, sm = s;
    sp[j] += h;
    sm[j] -= h;
    const double fd = (objective(sp, th) - objective(sm, th)) / (2.0 * h);
    CHECK(std::abs(fd - s_bar[j]) <= 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("model JSON round trip") {
  const SurrogateModel m = make_surrogate({200000.0, 0.3}, 207.0, 44, true, 3.25);
  const SurrogateModel back = SurrogateModel::from_json(nlohmann::json::parse(m.to_json().dump()));
  CHECK(back.theta() == m.theta());
  CHECK(back.iso.r_ref == m.iso.r_ref);
  CHECK(back.elastic.E == m.elastic.E);
  CHECK_THROWS_AS(SurrogateModel::from_json(nlohmann::json::parse("{}")), ParseError);
}

TEST_CASE("Armstrong-Frederick limit matches the one-dimensional oracle") {
  // X' = 50000 eps_p' - 400 X lambda' in the linear X = C eps_p convention.
  const ElasticParams el{212000.0, 0.26};
  const double sy = 208.0, C = 25000.0, a = 400.0 / (4.0 * C);
  SurrogateModel m = linear_kinematic(el, sy, C);
  linear_phi(m.kin, a);
  CHECK(m.kin.phi(2.0) == doctest::Approx(2.0 * a).epsilon(1e-12));
  const LoadingPath cycle{{{0.01, 400}, {-0.01, 800}, {0.01, 800}}};
  const auto path = cycle.targets();
  const auto ref = af_oracle(el.E, sy, C, a, path, 200);
  MaterialState st;
  double worst = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const UniaxialStepResult res = integrate_uniaxial(st, path[i], m);
    worst = std::max(worst, std::abs(res.sigma11 - ref[i]));
    peak = std::max(peak, std::abs(ref[i]));
    st = res.state;
  }
  CHECK(worst / peak < 5e-3);
}

TEST_CASE("Newton converges quadratically on plastic steps") {
  const auto m = make_material(make_surrogate({200000.0, 0.3}, 207.0, 21));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> s = m->initial_state();
  int checked = 0;
  for (int step = 0; step < 80; ++step) {
    SymTensor3 de;
    for (auto& v : de.c) v = 1e-3 * u(rng);
    const MaterialUpdate up = m->strain_step(s, de, false);
    const auto& h = up.info.history;
    // Last three iterates above the convergence tolerance.
    std::size_t n = h.size();
    while (n > 0 && h[n - 1] < 1e-12) --n;
    if (up.info.plastic && n >= 3) {
      CHECK(h[n - 2] <= 10.0 * h[n - 3] * h[n - 3]);
      CHECK(h[n - 1] <= 10.0 * h[n - 2] * h[n - 2]);
      ++checked;
    }
    s = up.state;
  }
  CHECK(checked > 5);
}
