#include "plastokit/return_map.hpp"

#include <algorithm>

namespace plastokit {

std::vector<double> SurrogateModel::theta() const {
  std::vector<double> th;
  th.reserve(static_cast<std::size_t>(num_params()));
  th.push_back(C);
  th.insert(th.end(), iso.net.params().begin(), iso.net.params().end());
  th.insert(th.end(), kin.net.params().begin(), kin.net.params().end());
  return th;
}

void SurrogateModel::set_theta(const std::vector<double>& th) {
  if (static_cast<int>(th.size()) != num_params()) throw InvalidArgument("surrogate parameter size mismatch");
  C = th[0];
  const auto ni = static_cast<std::ptrdiff_t>(iso.net.num_params());
  iso.net.set_params(std::vector<double>(th.begin() + 1, th.begin() + 1 + ni));
  kin.net.set_params(std::vector<double>(th.begin() + 1 + ni, th.end()));
}

std::vector<SurrogateModel::Group> SurrogateModel::param_groups() const {
  std::vector<Group> g;
  g.push_back(Group::Material);
  for (const ConstrainedNet* net : {&iso.net, &kin.net})
    for (int k = 0; k < net->num_params(); ++k)
      g.push_back(net->is_weight_or_bias(k) ? Group::NetWeight : Group::NetActivation);
  return g;
}

void SurrogateModel::project(double activation_floor) {
  C = std::max(0.0, C);
  iso.project(activation_floor);
  kin.project(activation_floor);
}

nlohmann::json SurrogateModel::to_json() const {
  nlohmann::json iso_j = iso.net.to_json();
  iso_j["input_scale"] = iso.input_scale;
  iso_j["r_ref"] = iso.r_ref;
  nlohmann::json kin_j = kin.net.to_json();
  kin_j["input_scale"] = kin.input_scale;
  return {{"E", elastic.E},     {"nu", elastic.nu},  {"sigma_y", yield.sigma_y},
          {"C", C},             {"isotropic", iso_j}, {"kinematic", kin_j}};
}

SurrogateModel SurrogateModel::from_json(const nlohmann::json& j) {
  try {
    SurrogateModel m;
    m.elastic.E = j.at("E").get<double>();
    m.elastic.nu = j.at("nu").get<double>();
    m.yield.sigma_y = j.at("sigma_y").get<double>();
    m.C = j.at("C").get<double>();
    m.iso.net = ConstrainedNet::from_json(j.at("isotropic"));
    m.iso.input_scale = j.at("isotropic").at("input_scale").get<double>();
    m.iso.r_ref = j.at("isotropic").at("r_ref").get<double>();
    m.kin.net = ConstrainedNet::from_json(j.at("kinematic"));
    m.kin.input_scale = j.at("kinematic").at("input_scale").get<double>();
    m.elastic.validate();
    m.yield.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model JSON: ") + e.what());
  }
}

SurrogateModel make_surrogate(const ElasticParams& el, double sigma_y, std::uint64_t seed, bool constrained,
                              double C0) {
  el.validate();
  SurrogateModel m;
  m.elastic = el;
  m.yield.sigma_y = sigma_y;
  m.yield.validate();
  m.iso = make_isotropic_net(seed, constrained);
  m.iso.r_ref = sigma_y;
  m.kin = make_kinematic_net(seed + 7919, constrained);
  m.C = C0;
  m.project();
  return m;
}

std::array<double, SurrogateKernel::kState> pack_state(const MaterialState& s) {
  std::array<double, SurrogateKernel::kState> out{};
  store(s.eps_e, out.data());
  store(s.eps_p, out.data() + 6);
  store(s.X, out.data() + 12);
  out[18] = s.r;
  return out;
}

MaterialState unpack_state(const double* s, const SurrogateModel& m) {
  MaterialState st;
  st.eps_e = sym_at(s);
  st.eps_p = sym_at(s + 6);
  st.X = sym_at(s + 12);
  st.r = s[18];
  st.R = m.iso.R(st.r);
  return st;
}

TrialResult trial_step(const MaterialState& state, const SymTensor3& deps, const SurrogateModel& m) {
  TrialResult t;
  t.eps_e = state.eps_e + deps;
  t.sigma = elastic_stress(t.eps_e, m.elastic);
  t.f = yield_value(t.sigma, state.X, m.iso.R(state.r), m.yield.sigma_y);
  return t;
}

namespace {
PlasticIncrement to_increment(const StepInfo& info) {
  PlasticIncrement inc;
  inc.dlambda = info.dlambda;
  inc.iterations = info.iterations;
  inc.converged = true;
  inc.plastic = info.plastic;
  return inc;
}
}  // namespace

StrainStepResult integrate_strain_controlled(const MaterialState& state, const SymTensor3& deps,
                                             const SurrogateModel& m, bool with_tangent,
                                             const NewtonOptions& opt) {
  const SurrogateKernel k(m);
  const auto s = pack_state(state);
  const auto th = m.theta();
  const auto out = solve_step(k, Control::Strain, s.data(), th.data(), deps.c.data(), opt);
  StrainStepResult res;
  res.state = unpack_state(out.state.data(), m);
  res.sigma = elastic_stress(res.state.eps_e, m.elastic);
  res.inc = to_increment(out.info);
  if (with_tangent) res.tangent = step_tangent(k, s.data(), th.data(), deps.c.data(), out);
  return res;
}

UniaxialStepResult integrate_uniaxial(const MaterialState& state, double eps11_target, const SurrogateModel& m,
                                      const NewtonOptions& opt) {
  const SurrogateKernel k(m);
  const auto s = pack_state(state);
  const auto th = m.theta();
  const std::array<double, 6> load{eps11_target, 0.0, 0.0, 0.0, 0.0, 0.0};
  const auto out = solve_step(k, Control::Uniaxial, s.data(), th.data(), load.data(), opt);
  UniaxialStepResult res;
  res.state = unpack_state(out.state.data(), m);
  res.sigma = elastic_stress(res.state.eps_e, m.elastic);
  res.sigma11 = res.sigma[0];
  res.inc = to_increment(out.info);
  return res;
}

Mat6 consistent_tangent(const MaterialState& state_n, const SymTensor3& deps, const SurrogateModel& m) {
  return integrate_strain_controlled(state_n, deps, m, true).tangent;
}

double dissipation_increment(const MaterialState& n, const MaterialState& out, const SymTensor3& sigma,
                             double dlambda, const SurrogateModel& m) {
  if (dlambda == 0.0) return 0.0;
  const double x_term = m.C > 0.0 ? contract(out.X, out.X - n.X) / (2.0 * m.C) : 0.0;
  return contract(sigma, out.eps_p - n.eps_p) - out.R * (out.r - n.r) - x_term;
}

}  // namespace plastokit
