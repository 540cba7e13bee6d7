#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "plastokit/dual.hpp"
#include "plastokit/errors.hpp"
#include "plastokit/tape.hpp"

namespace plastokit {

/// Reverse-mode gradient of a scalar function. f is called with a
/// std::vector<Var> and must return a Var.
template <class F>
std::vector<double> grad(F&& f, const std::vector<double>& x, double* value = nullptr) {
  Tape tape;
  Tape::Scope scope(tape);
  std::vector<Var> xv;
  xv.reserve(x.size());
  for (double xi : x) xv.push_back(tape.variable(xi));
  const Var out = f(xv);
  if (!std::isfinite(out.v)) throw NonFinite("grad: forward pass produced a non-finite value");
  if (value) *value = out.v;
  const std::vector<double> adj = tape.gradient(out);
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = adj[static_cast<std::size_t>(xv[i].idx)];
  return g;
}

/// Forward-mode Jacobian of a vector function, evaluated in chunks of eight
/// tangent directions. F is called with std::vector<Dual<double, 8>>.
template <class F>
Eigen::MatrixXd jacobian(F&& fn, const std::vector<double>& x) {
  constexpr int kChunk = 8;
  using D = Dual<double, kChunk>;
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd jac;
  for (int start = 0; start < std::max(n, 1); start += kChunk) {
    std::vector<D> xd(x.begin(), x.end());
    for (int k = 0; k < kChunk && start + k < n; ++k) xd[static_cast<std::size_t>(start + k)].d[k] = 1.0;
    const std::vector<D> y = fn(xd);
    if (jac.size() == 0) jac.setZero(static_cast<Eigen::Index>(y.size()), n);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!isfinite(y[i])) throw NonFinite("jacobian: non-finite output");
      for (int k = 0; k < kChunk && start + k < n; ++k)
        jac(static_cast<Eigen::Index>(i), start + k) = y[i].d[k];
    }
  }
  return jac;
}

/// Mixed second directional derivative u^T H(x) v by nested forward duals.
/// f is called with std::vector<Dual<Dual<double, 1>, 1>>.
template <class F>
double second_derivative(F&& f, const std::vector<double>& x, const std::vector<double>& u,
                         const std::vector<double>& v) {
  using Inner = Dual<double, 1>;
  using Outer = Dual<Inner, 1>;
  if (u.size() != x.size() || v.size() != x.size())
    throw InvalidArgument("second_derivative: direction size mismatch");
  std::vector<Outer> xd(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Inner val(x[i]);
    val.d[0] = u[i];
    xd[i].val = val;
    xd[i].d[0] = Inner(v[i]);
  }
  const Outer y = f(xd);
  if (!isfinite(y)) throw NonFinite("second_derivative: non-finite output");
  return y.d[0].d[0];
}

}  // namespace plastokit
