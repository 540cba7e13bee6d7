#include "plastokit/constitutive.hpp"

#include <cmath>

namespace plastokit {

void ElasticParams::validate() const {
  if (!(E > 0.0) || !std::isfinite(E)) throw InvalidArgument("Young's modulus must be positive");
  if (!(nu > -1.0 && nu < 0.5)) throw InvalidArgument("Poisson ratio must lie in (-1, 0.5)");
}

void YieldParams::validate() const {
  if (!(sigma_y > 0.0) || !std::isfinite(sigma_y)) throw InvalidArgument("yield stress must be positive");
}

Mat6 elastic_modulus(const ElasticParams& p) {
  const double lam = p.lambda();
  const double mu = p.mu();
  Mat6 d = Mat6::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) d(i, j) = lam;
    d(i, i) += 2.0 * mu;
  }
  for (int i = 3; i < 6; ++i) d(i, i) = 2.0 * mu;
  return d;
}

double elastic_energy(const SymTensor3& eps_e, const ElasticParams& p) {
  return 0.5 * contract(elastic_stress(eps_e, p), eps_e);
}

double yield_value_pi(const SymTensor3& sigma, const SymTensor3& x, double r_factor, const YieldParams& p) {
  const PiCoords pc = pi_coords(principal_values(sigma - x));
  const double p1 = r_factor * pc.p1;
  const double p2 = r_factor * pc.p2;
  return std::sqrt(1.5) * std::sqrt(p1 * p1 + p2 * p2) - p.sigma_y;
}

YieldGradients yield_gradients(const SymTensor3& sigma, const SymTensor3& x, double r_factor,
                               const YieldParams& p) {
  const SymTensor3 s = sigma - x;
  const double j = vm_equivalent(s);
  if (j < 1e-12 * p.sigma_y) throw DegenerateState("yield gradient undefined on the hydrostatic axis");
  const SymTensor3 n = deviator(s) * (1.5 * r_factor / j);
  return {n, -n, j};
}

LinearElastic::LinearElastic(ElasticParams p) : p_(p) { p_.validate(); }
SymTensor3 LinearElastic::stress(const SymTensor3& eps_e) const { return elastic_stress(eps_e, p_); }
Mat6 LinearElastic::modulus() const { return elastic_modulus(p_); }

HomotheticVonMises::HomotheticVonMises(YieldParams p) : p_(p) { p_.validate(); }

double HomotheticVonMises::value(const SymTensor3& sigma, const SymTensor3& x, double r_factor) const {
  return yield_value(sigma, x, r_factor, p_.sigma_y);
}

YieldGradients HomotheticVonMises::gradients(const SymTensor3& sigma, const SymTensor3& x,
                                             double r_factor) const {
  return yield_gradients(sigma, x, r_factor, p_);
}

}  // namespace plastokit
