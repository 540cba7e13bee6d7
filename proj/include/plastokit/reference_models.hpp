#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "plastokit/constitutive.hpp"
#include "plastokit/implicit_step.hpp"
#include "plastokit/tensor.hpp"

namespace plastokit {

/// Single nonlinear kinematic hardening law with Voce isotropic hardening.
struct SingleNlkParams {
  double E = 200e3;
  double nu = 0.3;
  double C = 15.0;
  double gamma = 550.0;
  double m = 0.9;
  double H1 = 0.1875;
  double H2 = 0.25;
  double H3 = 2.0;
  double sigma_y = 207.0;

  static SingleNlkParams table2() { return {}; }
  ElasticParams elastic() const { return {E, nu}; }
  /// [C, gamma, m, H1, H2, H3]
  std::array<double, 6> fit_vector() const { return {C, gamma, m, H1, H2, H3}; }
  void set_fit_vector(const std::array<double, 6>& v);
  void validate() const;
};

/// Superposed backstresses (up to three) with saturating isotropic hardening.
struct MultiNlkParams {
  std::array<double, 3> C{80000.0, 300000.0, 1000.0};
  std::array<double, 3> gamma{800.0, 10000.0, 7.0};
  double b = 8.0;
  double Q_M = 300.0;
  double Q_0 = 14.0;
  double mu = 10.0;
  double k = 100.0;
  double m = 2.0;
  double E = 200000.0;
  double nu = 0.3;

  static MultiNlkParams table3() { return {}; }
  ElasticParams elastic() const { return {E, nu}; }
  /// [C1, g1, C2, g2, C3, g3, b, Q_M, Q_0, mu, k, m]
  std::vector<double> theta() const;
  void validate() const;
};

struct ParamBounds {
  std::array<double, 6> lower{1.0, 1.0, 0.5, 0.01, 0.01, 0.01};
  std::array<double, 6> upper{100.0, 2000.0, 1.5, 5.0, 5.0, 5.0};
  void validate() const;
  bool contains(const std::array<double, 6>& v) const;
};

template <class T>
T voce_R(const T& r, const T& H1, const T& H2, const T& H3) {
  using std::exp;
  return H1 * r + H2 * (1.0 - exp(-H3 * r));
}

inline double voce_R(double r, const SingleNlkParams& p) { return voce_R(r, p.H1, p.H2, p.H3); }

/// Saturation target of the multi-model isotropic hardening, evaluated at
/// the largest plastic strain amplitude q seen so far.
template <class T>
T multi_Q(const T& q, const T& Q_M, const T& Q_0, const T& mu) {
  using std::exp;
  return Q_M + (Q_0 - Q_M) * exp(-mu * q);
}

/// State: eps_e(6) eps_p(6) X(6) r. Unknowns: eps_e, X/sigma_y, r, dlambda E/sigma_y.
/// theta = [C, gamma, m, H1, H2, H3].
struct SingleNlkKernel {
  static constexpr int kState = 19;
  static constexpr int kUnknowns = 14;

  ElasticParams el;
  double sy = 207.0;

  explicit SingleNlkKernel(const SingleNlkParams& p) : el(p.elastic()), sy(p.sigma_y) {}

  const ElasticParams& elastic() const { return el; }
  double sigma_y() const { return sy; }
  int n_theta() const { return 6; }
  double dlambda(const double* x) const { return x[13] * sy / el.E; }

  void pack_guess(const double* s, double* x) const {
    for (int i = 0; i < 6; ++i) x[i] = s[i];
    for (int i = 0; i < 6; ++i) x[6 + i] = s[12 + i] / sy;
    x[12] = s[18];
    x[13] = 0.0;
  }

  double trial_yield(const SymTensor3& ee, const double* s, const double* th) const {
    return vm_equivalent(elastic_stress(ee, el) - sym_at(s + 12)) - sy - voce_R(s[18], th[3], th[4], th[5]);
  }

  template <class T>
  struct Kinematics {
    SymTensor<T> ee, X, n;
    T r, dl, J;
  };

  template <class T>
  Kinematics<T> kinematics(const T* x) const {
    Kinematics<T> k;
    k.ee = sym_at(x);
    for (int i = 0; i < 6; ++i) k.X.c[static_cast<std::size_t>(i)] = x[6 + i] * sy;
    k.r = x[12];
    k.dl = x[13] * (sy / el.E);
    const SymTensor<T> rel = elastic_stress(k.ee, el) - k.X;
    k.J = vm_equivalent(rel);
    k.n = deviator(rel) * (1.5 / k.J);
    return k;
  }

  template <class T>
  void residual(Control c, const T* x, const T* s, const T* th, const T* load, T* F) const {
    const Kinematics<T> k = kinematics(x);
    const T& C = th[0];
    const T sat = th[1] * safe_pow(contract(k.X, k.X), th[2]);
    strain_rows(c, el, sy, k.ee, s, k.n * k.dl, load, F);
    for (int i = 0; i < 6; ++i) {
      const auto q = static_cast<std::size_t>(i);
      F[6 + i] = (k.X.c[q] - s[12 + i] - k.dl * ((2.0 / 3.0) * C * k.n.c[q] - sat * k.X.c[q])) / sy;
    }
    F[12] = (k.r - s[18] - k.dl) * (el.E / sy);
    F[13] = (k.J - sy - voce_R(k.r, th[3], th[4], th[5])) / sy;
  }

  template <class T>
  void advance(Control, const T* x, const T* s, const T*, const T*, T* s_out) const {
    const Kinematics<T> k = kinematics(x);
    store(k.ee, s_out);
    for (int i = 0; i < 6; ++i) s_out[6 + i] = s[6 + i] + k.dl * k.n.c[static_cast<std::size_t>(i)];
    store(k.X, s_out + 12);
    s_out[18] = k.r;
  }

  /// sigma:d eps_p - R d r - X:d alpha with X = (2/3) C alpha.
  double dissipation(const double* s_n, const double* s_out, const double* th) const;
};

/// State: eps_e(6) eps_p(6) X1 X2 X3 (18) r R q. Unknowns: eps_e, X_i/k, r,
/// R/k, dlambda E/k. theta = MultiNlkParams::theta().
struct MultiNlkKernel {
  static constexpr int kState = 33;
  static constexpr int kUnknowns = 27;

  ElasticParams el;
  double sy = 100.0;
  std::array<bool, 3> active{true, true, true};

  explicit MultiNlkKernel(const MultiNlkParams& p) : el(p.elastic()), sy(p.k) {
    for (int i = 0; i < 3; ++i) active[static_cast<std::size_t>(i)] = p.C[static_cast<std::size_t>(i)] > 0.0;
  }

  const ElasticParams& elastic() const { return el; }
  double sigma_y() const { return sy; }
  int n_theta() const { return 12; }
  double dlambda(const double* x) const { return x[26] * sy / el.E; }

  void pack_guess(const double* s, double* x) const {
    for (int i = 0; i < 6; ++i) x[i] = s[i];
    for (int i = 0; i < 18; ++i) x[6 + i] = s[12 + i] / sy;
    x[24] = s[30];
    x[25] = s[31] / sy;
    x[26] = 0.0;
  }

  double trial_yield(const SymTensor3& ee, const double* s, const double*) const {
    const SymTensor3 X = sym_at(s + 12) + sym_at(s + 18) + sym_at(s + 24);
    return vm_equivalent(elastic_stress(ee, el) - X) - sy - s[31];
  }

  template <class T>
  struct Kinematics {
    SymTensor<T> ee, X[3], Xsum, n;
    T r, R, dl, J;
  };

  template <class T>
  Kinematics<T> kinematics(const T* x) const {
    Kinematics<T> k;
    k.ee = sym_at(x);
    k.Xsum = SymTensor<T>::zero();
    for (int b = 0; b < 3; ++b) {
      for (int i = 0; i < 6; ++i) k.X[b].c[static_cast<std::size_t>(i)] = x[6 + 6 * b + i] * sy;
      k.Xsum += k.X[b];
    }
    k.r = x[24];
    k.R = x[25] * sy;
    k.dl = x[26] * (sy / el.E);
    const SymTensor<T> rel = elastic_stress(k.ee, el) - k.Xsum;
    k.J = vm_equivalent(rel);
    k.n = deviator(rel) * (1.5 / k.J);
    return k;
  }

  template <class T>
  void residual(Control c, const T* x, const T* s, const T* th, const T* load, T* F) const {
    const Kinematics<T> k = kinematics(x);
    const T& b = th[6];
    const T& ksy = th[10];
    const T& m = th[11];
    strain_rows(c, el, sy, k.ee, s, k.n * k.dl, load, F);
    const T tau = 1.0 + k.R / ksy;
    for (int bs = 0; bs < 3; ++bs) {
      const T* Xn = s + 12 + 6 * bs;
      T* Fb = F + 6 + 6 * bs;
      const SymTensor<T>& X = k.X[bs];
      if (!active[static_cast<std::size_t>(bs)]) {
        for (int i = 0; i < 6; ++i) Fb[i] = (X.c[static_cast<std::size_t>(i)] - Xn[i]) / sy;
        continue;
      }
      const T& Ci = th[2 * bs];
      const T gi = th[2 * bs + 1] / tau;
      const SymTensor<T> dX = deviator(X);
      // J(X_i)^(m-1) through the squared norm to stay smooth at X_i = 0.
      const T jpow = safe_pow(1.5 * frobenius_sq(dX), 0.5 * (m - 1.0));
      const T recall = gi * gi / Ci * jpow;
      for (int i = 0; i < 6; ++i) {
        const auto q = static_cast<std::size_t>(i);
        Fb[i] = (X.c[q] - Xn[i] - k.dl * ((2.0 / 3.0) * Ci * k.n.c[q] - recall * X.c[q])) / sy;
      }
    }
    const T Q = multi_Q(s[32], th[7], th[8], th[9]);
    F[24] = (k.r - s[30] - k.dl) * (el.E / sy);
    F[25] = (k.R - s[31] - b * (Q - k.R) * k.dl) / sy;
    F[26] = (k.J - ksy - k.R) / sy;
  }

  template <class T>
  void advance(Control, const T* x, const T* s, const T*, const T*, T* s_out) const {
    using std::sqrt;
    const Kinematics<T> k = kinematics(x);
    store(k.ee, s_out);
    SymTensor<T> ep;
    for (int i = 0; i < 6; ++i) {
      s_out[6 + i] = s[6 + i] + k.dl * k.n.c[static_cast<std::size_t>(i)];
      ep.c[static_cast<std::size_t>(i)] = s_out[6 + i];
    }
    for (int b = 0; b < 3; ++b) store(k.X[b], s_out + 12 + 6 * b);
    s_out[30] = k.r;
    s_out[31] = k.R;
    const T amp2 = (2.0 / 3.0) * contract(ep, ep);
    if (value_of(amp2) > value_of(s[32]) * value_of(s[32]))
      s_out[32] = sqrt(amp2);
    else
      s_out[32] = s[32];
  }

  double dissipation(const double* s_n, const double* s_out, const double* th) const;
};

}  // namespace plastokit
