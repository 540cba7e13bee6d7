#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "plastokit/constitutive.hpp"
#include "plastokit/dual.hpp"
#include "plastokit/errors.hpp"
#include "plastokit/tape.hpp"
#include "plastokit/tensor.hpp"

namespace plastokit {

/// Full strain control (load = six strain increments) or uniaxial mixed
/// control (load[0] = total eps11 target, off-axis stresses held at zero).
enum class Control { Strain, Uniaxial };

struct NewtonOptions {
  int max_iter = 50;
  double tol = 1e-12;
  double accept_tol = 1e-10;
  double negative_multiplier_tol = 1e-12;
  double elastic_tol = 1e-11;  // fraction of sigma_y
};

struct StepInfo {
  bool plastic = false;
  int iterations = 0;
  double dlambda = 0.0;
  double residual = 0.0;
  std::vector<double> history;
};

template <class T>
SymTensor<T> sym_at(const T* p) {
  return SymTensor<T>::from(p);
}

template <class T>
void store(const SymTensor<T>& a, T* p) {
  for (int i = 0; i < 6; ++i) p[i] = a.c[static_cast<std::size_t>(i)];
}

/// y^e with y <= 0 mapped to exactly zero (value and derivatives).
template <class T, class E>
T safe_pow(const T& y, const E& e) {
  using std::exp;
  using std::log;
  if (value_of(y) <= 0.0) return T(0.0);
  return exp(e * log(y));
}

/// Elastic-predictor strain for either control mode. Every kernel stores the
/// elastic strain in state[0..5] and the plastic strain in state[6..11].
template <class T>
SymTensor<T> trial_elastic_strain(Control c, const ElasticParams& el, const T* s, const T* load) {
  if (c == Control::Strain) return sym_at(s) + sym_at(load);
  const T a = load[0] - s[6];
  return SymTensor<T>::diag(a, -el.nu * a, -el.nu * a);
}

/// Rows 0..5 of every residual. dep is the plastic strain increment.
template <class T>
void strain_rows(Control c, const ElasticParams& el, double sigma_y, const SymTensor<T>& ee,
                 const T* s_prev, const SymTensor<T>& dep, const T* load, T* F) {
  const double se = el.E / sigma_y;
  if (c == Control::Strain) {
    for (int i = 0; i < 6; ++i) F[i] = (ee.c[i] - s_prev[i] - load[i] + dep.c[i]) * se;
    return;
  }
  F[0] = (ee.c[0] + s_prev[6] + dep.c[0] - load[0]) * se;
  const SymTensor<T> sig = elastic_stress(ee, el);
  for (int i = 1; i < 6; ++i) F[i] = sig.c[static_cast<std::size_t>(i)] / sigma_y;
}

template <int NS, int NX>
struct StepOutput {
  std::array<double, NS> state{};
  std::array<double, NX> x{};
  StepInfo info;
};

/// Copy of the previous state with the elastic strain replaced by the trial.
template <class K, class T>
void elastic_advance(const K& k, Control c, const T* s, const T* load, T* s_out) {
  for (int i = 0; i < K::kState; ++i) s_out[i] = s[i];
  store(trial_elastic_strain(c, k.elastic(), s, load), s_out);
}

namespace detail {
template <class T>
std::vector<T> promote(const double* p, int n) {
  std::vector<T> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = T(p[i]);
  return out;
}
}  // namespace detail

/// Residual and Jacobian at x via forward duals.
template <class K>
void residual_and_jacobian(const K& k, Control c, const double* x, const double* s, const double* th,
                           const double* load, Eigen::Matrix<double, K::kUnknowns, 1>& F,
                           Eigen::Matrix<double, K::kUnknowns, K::kUnknowns>& J) {
  constexpr int N = K::kUnknowns;
  using D = Dual<double, N>;
  std::array<D, N> xd;
  for (int i = 0; i < N; ++i) xd[static_cast<std::size_t>(i)] = D::variable(x[i], i);
  const auto sd = detail::promote<D>(s, K::kState);
  const auto thd = detail::promote<D>(th, k.n_theta());
  const auto ld = detail::promote<D>(load, 6);
  std::array<D, N> Fd;
  k.residual(c, xd.data(), sd.data(), thd.data(), ld.data(), Fd.data());
  for (int i = 0; i < N; ++i) {
    const D& f = Fd[static_cast<std::size_t>(i)];
    F(i) = f.val;
    for (int j = 0; j < N; ++j) J(i, j) = f.d[static_cast<std::size_t>(j)];
  }
}

/// One implicit step: elastic predictor, then plain Newton on the kernel's
/// residual starting from the previous values with a zero multiplier.
template <class K>
StepOutput<K::kState, K::kUnknowns> solve_step(const K& k, Control c, const double* s, const double* th,
                                                const double* load, const NewtonOptions& opt = {}) {
  constexpr int N = K::kUnknowns;
  StepOutput<K::kState, N> out;

  const SymTensor3 ee_trial = trial_elastic_strain<double>(c, k.elastic(), s, load);
  const double f_trial = k.trial_yield(ee_trial, s, th);
  if (!std::isfinite(f_trial)) throw NonFinite("trial yield value is not finite");
  if (f_trial <= opt.elastic_tol * k.sigma_y()) {
    elastic_advance(k, c, s, load, out.state.data());
    k.pack_guess(out.state.data(), out.x.data());
    return out;
  }

  Eigen::Matrix<double, N, 1> x;
  k.pack_guess(s, x.data());
  for (int i = 0; i < 6; ++i) x(i) = ee_trial.c[static_cast<std::size_t>(i)];
  Eigen::Matrix<double, N, 1> F;
  Eigen::Matrix<double, N, N> J;
  bool converged = false;
  double prev = std::numeric_limits<double>::infinity();
  int it = 0;
  for (;; ++it) {
    residual_and_jacobian(k, c, x.data(), s, th, load, F, J);
    const double norm = F.template lpNorm<Eigen::Infinity>();
    if (!std::isfinite(norm)) throw NoConvergence("return map residual became non-finite");
    out.info.history.push_back(norm);
    out.info.residual = norm;
    if (norm <= opt.tol || (norm <= opt.accept_tol && norm > 0.5 * prev)) {
      converged = true;
      break;
    }
    if (it >= opt.max_iter) break;
    prev = norm;
    Eigen::PartialPivLU<Eigen::Matrix<double, N, N>> lu(J);
    const Eigen::Matrix<double, N, 1> dx = lu.solve(-F);
    if (!dx.allFinite()) throw NoConvergence("return map Newton update is not finite");
    x += dx;
  }
  if (!converged)
  {
    std::ostringstream msg;
    msg << "return map did not converge in " << opt.max_iter << " iterations (residual " << std::scientific
        << std::setprecision(3) << out.info.residual << ")";
    throw NoConvergence(msg.str());
  }

  out.info.plastic = true;
  out.info.iterations = it;
  out.info.dlambda = k.dlambda(x.data());
  if (out.info.dlambda < -opt.negative_multiplier_tol) throw NegativeMultiplier("negative plastic multiplier");
  for (int i = 0; i < N; ++i) out.x[static_cast<std::size_t>(i)] = x(i);
  const auto ld = detail::promote<double>(load, 6);
  k.advance(c, x.data(), s, th, ld.data(), out.state.data());
  return out;
}

/// d sigma / d(strain increment) for a strain-controlled step; x is the
/// converged solution of the step.
template <class K>
Mat6 step_tangent(const K& k, const double* s, const double* th, const double* load,
                  const StepOutput<K::kState, K::kUnknowns>& out) {
  const Mat6 ce = elastic_modulus(k.elastic());
  if (!out.info.plastic) return ce;
  constexpr int N = K::kUnknowns;
  using D = Dual<double, N + 6>;
  std::array<D, N> xd;
  for (int i = 0; i < N; ++i) xd[static_cast<std::size_t>(i)] = D::variable(out.x[static_cast<std::size_t>(i)], i);
  const auto sd = detail::promote<D>(s, K::kState);
  const auto thd = detail::promote<D>(th, k.n_theta());
  std::array<D, 6> ld;
  for (int i = 0; i < 6; ++i) ld[static_cast<std::size_t>(i)] = D::variable(load[i], N + i);
  std::array<D, N> Fd;
  k.residual(Control::Strain, xd.data(), sd.data(), thd.data(), ld.data(), Fd.data());
  Eigen::Matrix<double, N, N> J;
  Eigen::Matrix<double, N, 6> Fl;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N + 6; ++j) {
      const double v = Fd[static_cast<std::size_t>(i)].d[static_cast<std::size_t>(j)];
      if (j < N)
        J(i, j) = v;
      else
        Fl(i, j - N) = v;
    }
  Eigen::FullPivLU<Eigen::Matrix<double, N, N>> lu(J);
  if (!lu.isInvertible()) throw SingularSystem("singular return-map Jacobian");
  const Eigen::Matrix<double, N, 6> dx = -lu.solve(Fl);
  // The elastic strain is unknowns 0..5 in every kernel.
  return ce * dx.template topRows<6>();
}

/// Reverse step through one converged update s_out = G(x*, s, th) with
/// F(x*, s, th) = 0. Given s_bar_out, writes s_bar (overwritten) and adds
/// into th_bar.
template <class K>
void step_adjoint(const K& k, Control c, const double* s, const double* th, const double* load,
                  const StepOutput<K::kState, K::kUnknowns>& out, const double* s_bar_out, double* s_bar,
                  double* th_bar) {
  constexpr int N = K::kUnknowns;
  constexpr int NS = K::kState;
  const int nt = k.n_theta();
  Tape tape;
  Tape::Scope scope(tape);
  std::vector<Var> sv(NS), tv(static_cast<std::size_t>(nt)), lv(6);
  for (int i = 0; i < NS; ++i) sv[static_cast<std::size_t>(i)] = tape.variable(s[i]);
  for (int i = 0; i < 6; ++i) lv[static_cast<std::size_t>(i)] = Var(load[i]);

  if (!out.info.plastic) {
    std::array<Var, NS> g;
    elastic_advance(k, c, sv.data(), lv.data(), g.data());
    std::vector<double> adj(tape.size(), 0.0);
    for (int i = 0; i < NS; ++i)
      if (!g[static_cast<std::size_t>(i)].is_constant()) adj[static_cast<std::size_t>(g[static_cast<std::size_t>(i)].idx)] += s_bar_out[i];
    tape.backward(adj);
    for (int i = 0; i < NS; ++i) s_bar[i] = adj[static_cast<std::size_t>(sv[static_cast<std::size_t>(i)].idx)];
    return;
  }

  for (int i = 0; i < nt; ++i) tv[static_cast<std::size_t>(i)] = tape.variable(th[i]);
  std::array<Var, N> xv;
  for (int i = 0; i < N; ++i) xv[static_cast<std::size_t>(i)] = tape.variable(out.x[static_cast<std::size_t>(i)]);
  std::array<Var, N> Fv;
  std::array<Var, NS> Gv;
  k.residual(c, xv.data(), sv.data(), tv.data(), lv.data(), Fv.data());
  k.advance(c, xv.data(), sv.data(), tv.data(), lv.data(), Gv.data());

  auto leaf_adj = [](const std::vector<double>& adj, const Var& v) {
    return v.is_constant() ? 0.0 : adj[static_cast<std::size_t>(v.idx)];
  };

  std::vector<double> adj(tape.size(), 0.0);
  for (int i = 0; i < NS; ++i)
    if (!Gv[static_cast<std::size_t>(i)].is_constant()) adj[static_cast<std::size_t>(Gv[static_cast<std::size_t>(i)].idx)] += s_bar_out[i];
  tape.backward(adj);

  Eigen::Matrix<double, N, 1> xbar;
  for (int i = 0; i < N; ++i) xbar(i) = leaf_adj(adj, xv[static_cast<std::size_t>(i)]);
  for (int i = 0; i < NS; ++i) s_bar[i] = leaf_adj(adj, sv[static_cast<std::size_t>(i)]);
  for (int i = 0; i < nt; ++i) th_bar[i] += leaf_adj(adj, tv[static_cast<std::size_t>(i)]);

  Eigen::Matrix<double, N, 1> F;
  Eigen::Matrix<double, N, N> J;
  residual_and_jacobian(k, c, out.x.data(), s, th, load, F, J);
  const Eigen::Matrix<double, N, 1> mu = J.transpose().partialPivLu().solve(xbar);

  std::fill(adj.begin(), adj.end(), 0.0);
  for (int i = 0; i < N; ++i)
    if (!Fv[static_cast<std::size_t>(i)].is_constant()) adj[static_cast<std::size_t>(Fv[static_cast<std::size_t>(i)].idx)] += mu(i);
  tape.backward(adj);
  for (int i = 0; i < NS; ++i) s_bar[i] -= leaf_adj(adj, sv[static_cast<std::size_t>(i)]);
  for (int i = 0; i < nt; ++i) th_bar[i] -= leaf_adj(adj, tv[static_cast<std::size_t>(i)]);
}

}  // namespace plastokit
