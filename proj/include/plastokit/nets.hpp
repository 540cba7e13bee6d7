#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "plastokit/dual.hpp"
#include "plastokit/errors.hpp"

namespace plastokit {

enum class Flavor { Positive, PositiveMonotone, PositiveMonotoneConvex, Unconstrained };
enum class Activation { Softplus, Logistic };

std::string to_string(Flavor f);
std::string to_string(Activation a);
Flavor flavor_from_string(const std::string& s);
Activation activation_from_string(const std::string& s);

/// Value and first two derivatives of a scalar function.
template <class T>
struct Eval3 {
  T v;
  T d1;
  T d2;
};

/// (1/beta) log(1 + beta e^x), evaluated without overflow.
template <class T>
Eval3<T> softplus_param3(const T& x, const T& beta) {
  using std::exp;
  using std::log;
  using std::log1p;
  const T u = x + log(beta);
  T sp;
  T sg;
  if (value_of(u) > 0.0) {
    const T e = exp(-u);
    sp = u + log1p(e);
    sg = 1.0 / (1.0 + e);
  } else {
    const T e = exp(u);
    sp = log1p(e);
    sg = e / (1.0 + e);
  }
  const T d1 = sg / beta;
  return {sp / beta, d1, d1 * (1.0 - sg)};
}

/// 1 / (1 + exp(-beta1 (x - beta2))).
template <class T>
Eval3<T> logistic_param3(const T& x, const T& beta1, const T& beta2) {
  using std::exp;
  const T z = beta1 * (x - beta2);
  T s;
  if (value_of(z) >= 0.0) {
    s = 1.0 / (1.0 + exp(-z));
  } else {
    const T e = exp(z);
    s = e / (1.0 + e);
  }
  const T q = s * (1.0 - s);
  return {s, beta1 * q, beta1 * beta1 * q * (1.0 - 2.0 * s)};
}

double softplus_param(double x, double beta);
double logistic_param(double x, double beta1, double beta2);

/// Feed-forward scalar network with one shared activation family on the
/// hidden layers and a linear output layer. Parameters live in one flat
/// vector: per layer W (row-major, out x in) then b, then the activation
/// parameters of every hidden layer.
class ConstrainedNet {
 public:
  ConstrainedNet() = default;
  ConstrainedNet(Flavor flavor, Activation activation, std::vector<int> widths);

  Flavor flavor() const { return flavor_; }
  Activation activation() const { return activation_; }
  const std::vector<int>& widths() const { return widths_; }
  int num_layers() const { return static_cast<int>(widths_.size()) - 1; }
  int num_hidden() const { return num_layers() - 1; }
  int activation_params_per_layer() const { return activation_ == Activation::Softplus ? 1 : 2; }

  int num_params() const { return static_cast<int>(params_.size()); }
  const std::vector<double>& params() const { return params_; }
  std::vector<double>& params() { return params_; }
  void set_params(const std::vector<double>& p);

  int weight_offset(int layer) const;
  int bias_offset(int layer) const;
  int activation_offset(int hidden_layer) const;
  /// True for W and b entries, false for activation parameters.
  bool is_weight_or_bias(int k) const { return k < activation_offset(0); }

  /// Output bias index (the last bias entry).
  int output_bias_index() const { return bias_offset(num_layers() - 1); }

  /// Forward pass with input derivatives; p points at num_params() values.
  template <class T>
  Eval3<T> eval(const T* p, const T& x) const;

  Eval3<double> forward3(double x) const { return eval<double>(params_.data(), x); }
  double forward(double x) const;

  /// True when every weight and bias is non-negative.
  bool weights_nonnegative() const;

  /// Clamps weights and biases at 0 (unless flavor is Unconstrained) and
  /// activation parameters at floor.
  void project(double activation_floor = 1e-6);

  nlohmann::json to_json() const;
  static ConstrainedNet from_json(const nlohmann::json& j);

 private:
  Flavor flavor_ = Flavor::Positive;
  Activation activation_ = Activation::Softplus;
  std::vector<int> widths_;
  std::vector<double> params_;
};

/// Kaiming-uniform draw (bound 1/sqrt(fan_in)) mapped through |.|; hidden
/// activation parameters start at 1 (softplus beta) or (1, 0.5) (logistic).
ConstrainedNet init_net(Flavor flavor, std::uint64_t seed, std::vector<int> widths = {1, 10, 1},
                        Activation activation = Activation::Softplus);

Activation default_activation(Flavor flavor);

template <class T>
Eval3<T> ConstrainedNet::eval(const T* p, const T& x) const {
  const int layers = num_layers();
  std::vector<T> h{x};
  std::vector<T> h1{T(1.0)};
  std::vector<T> h2{T(0.0)};
  for (int l = 0; l < layers; ++l) {
    const int in = widths_[static_cast<std::size_t>(l)];
    const int out = widths_[static_cast<std::size_t>(l) + 1];
    const T* w = p + weight_offset(l);
    const T* b = p + bias_offset(l);
    const bool hidden = l + 1 < layers;
    std::vector<T> z(static_cast<std::size_t>(out)), z1(static_cast<std::size_t>(out)),
        z2(static_cast<std::size_t>(out));
    for (int o = 0; o < out; ++o) {
      T acc = b[o];
      T acc1 = T(0.0);
      T acc2 = T(0.0);
      for (int i = 0; i < in; ++i) {
        const T& wi = w[o * in + i];
        acc = acc + wi * h[static_cast<std::size_t>(i)];
        acc1 = acc1 + wi * h1[static_cast<std::size_t>(i)];
        acc2 = acc2 + wi * h2[static_cast<std::size_t>(i)];
      }
      z[static_cast<std::size_t>(o)] = acc;
      z1[static_cast<std::size_t>(o)] = acc1;
      z2[static_cast<std::size_t>(o)] = acc2;
    }
    if (hidden) {
      const T* a = p + activation_offset(l);
      for (int o = 0; o < out; ++o) {
        const auto k = static_cast<std::size_t>(o);
        const Eval3<T> s = activation_ == Activation::Softplus ? softplus_param3(z[k], a[0])
                                                                : logistic_param3(z[k], a[0], a[1]);
        z2[k] = s.d2 * z1[k] * z1[k] + s.d1 * z2[k];
        z1[k] = s.d1 * z1[k];
        z[k] = s.v;
      }
    }
    h = std::move(z);
    h1 = std::move(z1);
    h2 = std::move(z2);
  }
  return {h[0], h1[0], h2[0]};
}

/// R(r) = 1/N(s r) - 1/N(0) + 1 with s = input_scale / r_ref. N is a
/// positive, increasing network, so R starts at exactly 1 and decreases.
struct IsotropicHardeningNet {
  ConstrainedNet net;
  double input_scale = 100.0;
  double r_ref = 1.0;

  double scale() const { return input_scale / r_ref; }

  template <class T>
  Eval3<T> eval(const T* p, const T& r) const {
    const double s = scale();
    const Eval3<T> n = net.eval(p, T(s) * r);
    const Eval3<T> n0 = net.eval(p, T(0.0));
    const T inv = 1.0 / n.v;
    const T v = inv - 1.0 / n0.v + 1.0;
    const T d1 = -s * n.d1 * inv * inv;
    const T d2 = s * s * (2.0 * n.d1 * n.d1 * inv - n.d2) * inv * inv;
    return {v, d1, d2};
  }

  double R(double r) const { return eval<double>(net.params().data(), r).v; }
  double dR(double r) const { return eval<double>(net.params().data(), r).d1; }
  void project(double activation_floor = 1e-6);
};

/// phi(y) = N(y) - N(0) with N positive, increasing and convex.
struct KinematicHardeningNet {
  ConstrainedNet net;
  double input_scale = 1.0;

  template <class T>
  Eval3<T> eval(const T* p, const T& y) const {
    const double s = input_scale;
    const Eval3<T> n = net.eval(p, T(s) * y);
    const Eval3<T> n0 = net.eval(p, T(0.0));
    return {n.v - n0.v, s * n.d1, s * s * n.d2};
  }

  double phi(double y) const { return eval<double>(net.params().data(), y).v; }
  double dphi(double y) const { return eval<double>(net.params().data(), y).d1; }
  void project(double activation_floor = 1e-6) { net.project(activation_floor); }
};

IsotropicHardeningNet make_isotropic_net(std::uint64_t seed, bool constrained = true,
                                         std::vector<int> widths = {1, 10, 1});
KinematicHardeningNet make_kinematic_net(std::uint64_t seed, bool constrained = true,
                                         std::vector<int> widths = {1, 10, 1});

double R_of_r(const IsotropicHardeningNet& h, double r);
double dR_dr(const IsotropicHardeningNet& h, double r);
double phi_of_xn(const KinematicHardeningNet& k, double xnorm2);
double dphi(const KinematicHardeningNet& k, double xnorm2);

}  // namespace plastokit
