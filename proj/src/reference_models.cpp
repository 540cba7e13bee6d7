#include "plastokit/reference_models.hpp"

#include <cmath>
#include <string>

#include "plastokit/errors.hpp"

namespace plastokit {

void SingleNlkParams::set_fit_vector(const std::array<double, 6>& v) {
  C = v[0];
  gamma = v[1];
  m = v[2];
  H1 = v[3];
  H2 = v[4];
  H3 = v[5];
}

void SingleNlkParams::validate() const {
  elastic().validate();
  if (!(sigma_y > 0.0)) throw InvalidArgument("single NLK: sigma_y must be positive");
  if (!(m > 0.0)) throw InvalidArgument("single NLK: m must be positive");
  for (double v : {C, gamma, H1, H2, H3})
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("single NLK: hardening parameters must be >= 0");
}

std::vector<double> MultiNlkParams::theta() const {
  return {C[0], gamma[0], C[1], gamma[1], C[2], gamma[2], b, Q_M, Q_0, mu, k, m};
}

void MultiNlkParams::validate() const {
  elastic().validate();
  if (!(k > 0.0)) throw InvalidArgument("multi NLK: k must be positive");
  if (!(m > 0.0)) throw InvalidArgument("multi NLK: m must be positive");
  for (double v : theta())
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("multi NLK: parameters must be >= 0");
}

void ParamBounds::validate() const {
  for (int i = 0; i < 6; ++i)
    if (!(lower[static_cast<std::size_t>(i)] < upper[static_cast<std::size_t>(i)]))
      throw InvalidArgument("parameter bounds: lower must be below upper (index " + std::to_string(i) + ")");
}

bool ParamBounds::contains(const std::array<double, 6>& v) const {
  for (std::size_t i = 0; i < 6; ++i)
    if (v[i] < lower[i] || v[i] > upper[i]) return false;
  return true;
}

double SingleNlkKernel::dissipation(const double* s_n, const double* s_out, const double* th) const {
  const SymTensor3 sig = elastic_stress(sym_at(s_out), el);
  const SymTensor3 dep = sym_at(s_out + 6) - sym_at(s_n + 6);
  const double dr = s_out[18] - s_n[18];
  if (dr == 0.0) return 0.0;
  const SymTensor3 X = sym_at(s_out + 12);
  const double R = voce_R(s_out[18], th[3], th[4], th[5]);
  const double x_term = th[0] > 0.0 ? 1.5 / th[0] * contract(X, X - sym_at(s_n + 12)) : 0.0;
  return contract(sig, dep) - R * dr - x_term;
}

double MultiNlkKernel::dissipation(const double* s_n, const double* s_out, const double* th) const {
  const SymTensor3 sig = elastic_stress(sym_at(s_out), el);
  const SymTensor3 dep = sym_at(s_out + 6) - sym_at(s_n + 6);
  const double dr = s_out[30] - s_n[30];
  if (dr == 0.0) return 0.0;
  double x_term = 0.0;
  for (int b = 0; b < 3; ++b) {
    const double Ci = th[2 * b];
    if (!active[static_cast<std::size_t>(b)] || Ci <= 0.0) continue;
    const SymTensor3 X = sym_at(s_out + 12 + 6 * b);
    x_term += 1.5 / Ci * contract(X, X - sym_at(s_n + 12 + 6 * b));
  }
  return contract(sig, dep) - s_out[31] * dr - x_term;
}

}  // namespace plastokit
