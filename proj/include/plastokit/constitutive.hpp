#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "plastokit/errors.hpp"
#include "plastokit/tensor.hpp"

namespace plastokit {

using Mat6 = Eigen::Matrix<double, 6, 6>;

struct ElasticParams {
  double E = 200000.0;
  double nu = 0.3;

  double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  double mu() const { return E / (2.0 * (1.0 + nu)); }
  double bulk() const { return E / (3.0 * (1.0 - 2.0 * nu)); }
  void validate() const;
};

struct YieldParams {
  double sigma_y = 207.0;
  void validate() const;
};

/// sigma = lambda tr(eps) I + 2 mu eps.
template <class T>
SymTensor<T> elastic_stress(const SymTensor<T>& eps_e, const ElasticParams& p) {
  const double lam = p.lambda();
  const double two_mu = 2.0 * p.mu();
  const T tr = trace(eps_e);
  SymTensor<T> s;
  for (int i = 0; i < 3; ++i) s.c[i] = lam * tr + two_mu * eps_e.c[i];
  for (int i = 3; i < 6; ++i) s.c[i] = two_mu * eps_e.c[i];
  return s;
}

/// Elastic modulus acting on stored strain components: sigma[i] = D(i, j) eps[j].
Mat6 elastic_modulus(const ElasticParams& p);

/// 0.5 eps:C:eps.
double elastic_energy(const SymTensor3& eps_e, const ElasticParams& p);

/// Homothetic von Mises yield value R J(sigma - X) - sigma_y.
template <class T>
T yield_value(const SymTensor<T>& sigma, const SymTensor<T>& x, const T& r_factor, double sigma_y) {
  return r_factor * vm_equivalent(sigma - x) - sigma_y;
}

/// Same value through principal values and pi-plane coordinates.
double yield_value_pi(const SymTensor3& sigma, const SymTensor3& x, double r_factor, const YieldParams& p);

struct YieldGradients {
  SymTensor3 df_dsigma;
  SymTensor3 df_dx;
  double df_dr_factor;
};

/// Tensor-valued partial derivatives (symmetric tensors, not Voigt-weighted).
YieldGradients yield_gradients(const SymTensor3& sigma, const SymTensor3& x, double r_factor,
                               const YieldParams& p);

/// Interface for pluggable elastic laws.
class ElasticLaw {
 public:
  virtual ~ElasticLaw() = default;
  virtual SymTensor3 stress(const SymTensor3& eps_e) const = 0;
  virtual Mat6 modulus() const = 0;
};

class LinearElastic final : public ElasticLaw {
 public:
  explicit LinearElastic(ElasticParams p);
  SymTensor3 stress(const SymTensor3& eps_e) const override;
  Mat6 modulus() const override;
  const ElasticParams& params() const { return p_; }

 private:
  ElasticParams p_;
};

/// Interface for pluggable yield functions of (sigma, X, R).
class YieldFunction {
 public:
  virtual ~YieldFunction() = default;
  virtual double value(const SymTensor3& sigma, const SymTensor3& x, double r_factor) const = 0;
  virtual YieldGradients gradients(const SymTensor3& sigma, const SymTensor3& x,
                                   double r_factor) const = 0;
};

class HomotheticVonMises final : public YieldFunction {
 public:
  explicit HomotheticVonMises(YieldParams p);
  double value(const SymTensor3& sigma, const SymTensor3& x, double r_factor) const override;
  YieldGradients gradients(const SymTensor3& sigma, const SymTensor3& x,
                           double r_factor) const override;
  const YieldParams& params() const { return p_; }

 private:
  YieldParams p_;
};

}  // namespace plastokit
