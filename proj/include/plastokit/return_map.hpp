#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "plastokit/constitutive.hpp"
#include "plastokit/implicit_step.hpp"
#include "plastokit/nets.hpp"
#include "plastokit/tensor.hpp"

namespace plastokit {

/// Trainable constitutive model: linear elasticity, homothetic von Mises
/// yield, hardening networks and the kinematic modulus C (X = 2 C alpha).
struct SurrogateModel {
  ElasticParams elastic;
  YieldParams yield;
  IsotropicHardeningNet iso;
  KinematicHardeningNet kin;
  double C = 1.0;

  enum class Group { Material, NetWeight, NetActivation };

  int num_params() const { return 1 + iso.net.num_params() + kin.net.num_params(); }
  /// Flat parameter vector [C, R-net params, phi-net params].
  std::vector<double> theta() const;
  void set_theta(const std::vector<double>& th);
  std::vector<Group> param_groups() const;

  /// Restores every constraint (C >= 0, network projections).
  void project(double activation_floor = 1e-6);
  bool constrained() const { return iso.net.flavor() != Flavor::Unconstrained; }

  nlohmann::json to_json() const;
  static SurrogateModel from_json(const nlohmann::json& j);
};

SurrogateModel make_surrogate(const ElasticParams& el, double sigma_y, std::uint64_t seed,
                              bool constrained = true, double C0 = 1.0);

/// Converged material-point state of the surrogate.
struct MaterialState {
  SymTensor3 eps_e;
  SymTensor3 eps_p;
  SymTensor3 X;
  double r = 0.0;
  double R = 1.0;
};

struct PlasticIncrement {
  double dlambda = 0.0;
  int iterations = 0;
  bool converged = true;
  bool plastic = false;
};

/// Newton kernel of the surrogate. State: eps_e(6) eps_p(6) X(6) r.
/// Unknowns: eps_e, X/sigma_y, r/sigma_y, dlambda E/sigma_y.
struct SurrogateKernel {
  static constexpr int kState = 19;
  static constexpr int kUnknowns = 14;

  ElasticParams el;
  double sy = 207.0;
  IsotropicHardeningNet iso;
  KinematicHardeningNet kin;

  explicit SurrogateKernel(const SurrogateModel& m) : el(m.elastic), sy(m.yield.sigma_y), iso(m.iso), kin(m.kin) {}

  const ElasticParams& elastic() const { return el; }
  double sigma_y() const { return sy; }
  int n_theta() const { return 1 + iso.net.num_params() + kin.net.num_params(); }
  int iso_offset() const { return 1; }
  int kin_offset() const { return 1 + iso.net.num_params(); }

  double dlambda(const double* x) const { return x[13] * sy / el.E; }

  void pack_guess(const double* s, double* x) const {
    for (int i = 0; i < 6; ++i) x[i] = s[i];
    for (int i = 0; i < 6; ++i) x[6 + i] = s[12 + i] / sy;
    x[12] = s[18] / sy;
    x[13] = 0.0;
  }

  double trial_yield(const SymTensor3& ee, const double* s, const double* th) const {
    const double R = iso.eval(th + iso_offset(), s[18]).v;
    return yield_value(elastic_stress(ee, el), sym_at(s + 12), R, sy);
  }

  template <class T>
  struct Kinematics {
    SymTensor<T> ee, X, n, sigma;
    T r, dl, J, R, dphi;
  };

  template <class T>
  Kinematics<T> kinematics(const T* x, const T* th) const {
    Kinematics<T> k;
    k.ee = sym_at(x);
    for (int i = 0; i < 6; ++i) k.X.c[static_cast<std::size_t>(i)] = x[6 + i] * sy;
    k.r = x[12] * sy;
    k.dl = x[13] * (sy / el.E);
    k.sigma = elastic_stress(k.ee, el);
    const SymTensor<T> rel = k.sigma - k.X;
    k.J = vm_equivalent(rel);
    k.R = iso.eval(th + iso_offset(), k.r).v;
    k.n = deviator(rel) * (1.5 * k.R / k.J);
    k.dphi = kin.eval(th + kin_offset(), frobenius_sq(k.X)).d1;
    return k;
  }

  template <class T>
  void residual(Control c, const T* x, const T* s, const T* th, const T* load, T* F) const {
    const Kinematics<T> k = kinematics(x, th);
    const T& C = th[0];
    strain_rows(c, el, sy, k.ee, s, k.n * k.dl, load, F);
    for (int i = 0; i < 6; ++i) {
      const auto q = static_cast<std::size_t>(i);
      F[6 + i] = (k.X.c[q] - s[12 + i] - 2.0 * C * k.dl * (k.n.c[q] - 2.0 * k.dphi * k.X.c[q])) / sy;
    }
    F[12] = (k.r - s[18] - k.dl * k.J) / sy;
    F[13] = (k.R * k.J - sy) / sy;
  }

  template <class T>
  void advance(Control, const T* x, const T* s, const T* th, const T*, T* s_out) const {
    const Kinematics<T> k = kinematics(x, th);
    store(k.ee, s_out);
    for (int i = 0; i < 6; ++i) s_out[6 + i] = s[6 + i] + k.dl * k.n.c[static_cast<std::size_t>(i)];
    store(k.X, s_out + 12);
    s_out[18] = k.r;
  }

  double dissipation(const double* s_n, const double* s_out, const double* th) const {
    const double dr = s_out[18] - s_n[18];
    if (dr == 0.0) return 0.0;
    const SymTensor3 sig = elastic_stress(sym_at(s_out), el);
    const SymTensor3 X = sym_at(s_out + 12);
    const double R = iso.eval(th + iso_offset(), s_out[18]).v;
    const double x_term = th[0] > 0.0 ? contract(X, X - sym_at(s_n + 12)) / (2.0 * th[0]) : 0.0;
    return contract(sig, sym_at(s_out + 6) - sym_at(s_n + 6)) - R * dr - x_term;
  }
};

/// The five-block Newton system with R kept as an unknown, rows written out
/// block by block (elastic strain, backstress, r, R, yield). Unknowns are
/// unscaled: eps_e(6), X(6), r, R, dlambda. Strain control only.
struct SurrogateBlockKernel {
  static constexpr int kState = 20;  // eps_e, eps_p, X, r, R
  static constexpr int kUnknowns = 15;

  ElasticParams el;
  double sy = 207.0;
  IsotropicHardeningNet iso;
  KinematicHardeningNet kin;

  explicit SurrogateBlockKernel(const SurrogateModel& m)
      : el(m.elastic), sy(m.yield.sigma_y), iso(m.iso), kin(m.kin) {}

  const ElasticParams& elastic() const { return el; }
  double sigma_y() const { return sy; }
  int n_theta() const { return 1 + iso.net.num_params() + kin.net.num_params(); }

  template <class T>
  void residual(Control, const T* x, const T* s, const T* th, const T* load, T* F) const {
    const SymTensor<T> ee = sym_at(x);
    const SymTensor<T> X = sym_at(x + 6);
    const T& r = x[12];
    const T& R = x[13];
    const T& dl = x[14];
    const T& C = th[0];
    const SymTensor<T> rel = elastic_stress(ee, el) - X;
    const T J = vm_equivalent(rel);
    const SymTensor<T> n = deviator(rel) * (1.5 * R / J);
    const T dphi = kin.eval(th + 1 + iso.net.num_params(), frobenius_sq(X)).d1;
    const T dR = iso.eval(th + 1, r).d1;
    for (int i = 0; i < 6; ++i) {
      const auto q = static_cast<std::size_t>(i);
      F[i] = ee.c[q] - s[i] - load[i] + dl * n.c[q];
      F[6 + i] = X.c[q] - s[12 + i] + 2.0 * C * dl * (-n.c[q] + 2.0 * dphi * X.c[q]);
    }
    F[12] = r - s[18] - dl * J;
    F[13] = R - s[19] - dl * dR * J;
    F[14] = R * J - sy;
  }
};

struct TrialResult {
  SymTensor3 eps_e;
  SymTensor3 sigma;
  double f = 0.0;
};

struct StrainStepResult {
  MaterialState state;
  SymTensor3 sigma;
  PlasticIncrement inc;
  Mat6 tangent = Mat6::Zero();
};

struct UniaxialStepResult {
  MaterialState state;
  double sigma11 = 0.0;
  SymTensor3 sigma;
  PlasticIncrement inc;
};

std::array<double, SurrogateKernel::kState> pack_state(const MaterialState& s);
MaterialState unpack_state(const double* s, const SurrogateModel& m);

TrialResult trial_step(const MaterialState& state, const SymTensor3& deps, const SurrogateModel& m);
StrainStepResult integrate_strain_controlled(const MaterialState& state, const SymTensor3& deps,
                                             const SurrogateModel& m, bool with_tangent = false,
                                             const NewtonOptions& opt = {});
UniaxialStepResult integrate_uniaxial(const MaterialState& state, double eps11_target, const SurrogateModel& m,
                                      const NewtonOptions& opt = {});
/// d sigma_{n+1} / d(strain increment) of the step from state_n.
Mat6 consistent_tangent(const MaterialState& state_n, const SymTensor3& deps, const SurrogateModel& m);

/// sigma:d eps_p - R d r - X:d alpha with alpha = X / (2C), end-of-step values.
double dissipation_increment(const MaterialState& n, const MaterialState& out, const SymTensor3& sigma,
                             double dlambda, const SurrogateModel& m);

}  // namespace plastokit
