#include "plastokit/nets.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace plastokit {

std::string to_string(Flavor f) {
  switch (f) {
    case Flavor::Positive: return "positive";
    case Flavor::PositiveMonotone: return "positive_monotone";
    case Flavor::PositiveMonotoneConvex: return "positive_monotone_convex";
    case Flavor::Unconstrained: return "unconstrained";
  }
  return "positive";
}

std::string to_string(Activation a) { return a == Activation::Softplus ? "softplus" : "logistic"; }

Flavor flavor_from_string(const std::string& s) {
  if (s == "positive") return Flavor::Positive;
  if (s == "positive_monotone") return Flavor::PositiveMonotone;
  if (s == "positive_monotone_convex") return Flavor::PositiveMonotoneConvex;
  if (s == "unconstrained") return Flavor::Unconstrained;
  throw ParseError("unknown network flavor '" + s + "'");
}

Activation activation_from_string(const std::string& s) {
  if (s == "softplus") return Activation::Softplus;
  if (s == "logistic") return Activation::Logistic;
  throw ParseError("unknown activation '" + s + "'");
}

double softplus_param(double x, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("softplus beta must be positive");
  return softplus_param3<double>(x, beta).v;
}

double logistic_param(double x, double beta1, double beta2) {
  return logistic_param3<double>(x, beta1, beta2).v;
}

Activation default_activation(Flavor flavor) {
  return flavor == Flavor::PositiveMonotone ? Activation::Logistic : Activation::Softplus;
}

ConstrainedNet::ConstrainedNet(Flavor flavor, Activation activation, std::vector<int> widths)
    : flavor_(flavor), activation_(activation), widths_(std::move(widths)) {
  if (widths_.size() < 2 || widths_.front() != 1 || widths_.back() != 1)
    throw InvalidArgument("network must map a scalar to a scalar");
  for (int w : widths_)
    if (w < 1) throw InvalidArgument("layer widths must be positive");
  params_.assign(static_cast<std::size_t>(activation_offset(num_hidden())), 0.0);
}

int ConstrainedNet::weight_offset(int layer) const {
  int off = 0;
  for (int l = 0; l < layer; ++l)
    off += widths_[static_cast<std::size_t>(l)] * widths_[static_cast<std::size_t>(l) + 1] +
           widths_[static_cast<std::size_t>(l) + 1];
  return off;
}

int ConstrainedNet::bias_offset(int layer) const {
  return weight_offset(layer) +
         widths_[static_cast<std::size_t>(layer)] * widths_[static_cast<std::size_t>(layer) + 1];
}

int ConstrainedNet::activation_offset(int hidden_layer) const {
  return weight_offset(num_layers()) + hidden_layer * activation_params_per_layer();
}

void ConstrainedNet::set_params(const std::vector<double>& p) {
  if (p.size() != params_.size()) throw InvalidArgument("parameter vector size mismatch");
  params_ = p;
}

double ConstrainedNet::forward(double x) const {
#ifndef NDEBUG
  if (flavor_ != Flavor::Unconstrained && !weights_nonnegative())
    throw ConstraintViolation("negative weight in a constrained network");
#endif
  return forward3(x).v;
}

bool ConstrainedNet::weights_nonnegative() const {
  const int end = activation_offset(0);
  for (int k = 0; k < end; ++k)
    if (params_[static_cast<std::size_t>(k)] < 0.0) return false;
  return true;
}

void ConstrainedNet::project(double activation_floor) {
  const int end = activation_offset(0);
  if (flavor_ != Flavor::Unconstrained)
    for (int k = 0; k < end; ++k) params_[static_cast<std::size_t>(k)] = std::max(0.0, params_[static_cast<std::size_t>(k)]);
  for (std::size_t k = static_cast<std::size_t>(end); k < params_.size(); ++k)
    params_[k] = std::max(activation_floor, params_[k]);
}

nlohmann::json ConstrainedNet::to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (int l = 0; l < num_layers(); ++l) {
    const int in = widths_[static_cast<std::size_t>(l)];
    const int out = widths_[static_cast<std::size_t>(l) + 1];
    nlohmann::json w = nlohmann::json::array();
    for (int o = 0; o < out; ++o) {
      nlohmann::json row = nlohmann::json::array();
      for (int i = 0; i < in; ++i) row.push_back(params_[static_cast<std::size_t>(weight_offset(l) + o * in + i)]);
      w.push_back(row);
    }
    nlohmann::json b = nlohmann::json::array();
    for (int o = 0; o < out; ++o) b.push_back(params_[static_cast<std::size_t>(bias_offset(l) + o)]);
    nlohmann::json act = nlohmann::json::array();
    if (l < num_hidden())
      for (int k = 0; k < activation_params_per_layer(); ++k)
        act.push_back(params_[static_cast<std::size_t>(activation_offset(l) + k)]);
    layers.push_back({{"W", w}, {"b", b}, {"activation_params", act}});
  }
  return {{"flavor", to_string(flavor_)},
          {"activation", to_string(activation_)},
          {"widths", widths_},
          {"layers", layers}};
}

ConstrainedNet ConstrainedNet::from_json(const nlohmann::json& j) {
  try {
    ConstrainedNet net(flavor_from_string(j.at("flavor").get<std::string>()),
                       activation_from_string(j.at("activation").get<std::string>()),
                       j.at("widths").get<std::vector<int>>());
    const auto& layers = j.at("layers");
    if (static_cast<int>(layers.size()) != net.num_layers()) throw ParseError("layer count mismatch");
    for (int l = 0; l < net.num_layers(); ++l) {
      const auto& lj = layers.at(static_cast<std::size_t>(l));
      const int in = net.widths_[static_cast<std::size_t>(l)];
      const int out = net.widths_[static_cast<std::size_t>(l) + 1];
      for (int o = 0; o < out; ++o) {
        for (int i = 0; i < in; ++i)
          net.params_[static_cast<std::size_t>(net.weight_offset(l) + o * in + i)] =
              lj.at("W").at(static_cast<std::size_t>(o)).at(static_cast<std::size_t>(i)).get<double>();
        net.params_[static_cast<std::size_t>(net.bias_offset(l) + o)] =
            lj.at("b").at(static_cast<std::size_t>(o)).get<double>();
      }
      if (l < net.num_hidden())
        for (int k = 0; k < net.activation_params_per_layer(); ++k)
          net.params_[static_cast<std::size_t>(net.activation_offset(l) + k)] =
              lj.at("activation_params").at(static_cast<std::size_t>(k)).get<double>();
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed network JSON: ") + e.what());
  }
}

ConstrainedNet init_net(Flavor flavor, std::uint64_t seed, std::vector<int> widths, Activation activation) {
  ConstrainedNet net(flavor, activation, std::move(widths));
  std::mt19937_64 rng(seed);
  auto& p = net.params();
  for (int l = 0; l < net.num_layers(); ++l) {
    const int in = net.widths()[static_cast<std::size_t>(l)];
    const int out = net.widths()[static_cast<std::size_t>(l) + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (int k = 0; k < in * out; ++k) p[static_cast<std::size_t>(net.weight_offset(l) + k)] = std::abs(u(rng));
    for (int k = 0; k < out; ++k) p[static_cast<std::size_t>(net.bias_offset(l) + k)] = std::abs(u(rng));
  }
  for (int h = 0; h < net.num_hidden(); ++h) {
    const int off = net.activation_offset(h);
    if (activation == Activation::Softplus) {
      p[static_cast<std::size_t>(off)] = 1.0;
    } else {
      p[static_cast<std::size_t>(off)] = 1.0;
      p[static_cast<std::size_t>(off) + 1] = 0.5;
    }
  }
  return net;
}

void IsotropicHardeningNet::project(double activation_floor) {
  net.project(activation_floor);
  if (net.flavor() != Flavor::Unconstrained) {
    auto& b = net.params()[static_cast<std::size_t>(net.output_bias_index())];
    b = std::max(1.0, b);
  }
}

IsotropicHardeningNet make_isotropic_net(std::uint64_t seed, bool constrained, std::vector<int> widths) {
  IsotropicHardeningNet h;
  h.net = init_net(constrained ? Flavor::PositiveMonotone : Flavor::Unconstrained, seed, std::move(widths),
                   Activation::Logistic);
  h.project();
  return h;
}

KinematicHardeningNet make_kinematic_net(std::uint64_t seed, bool constrained, std::vector<int> widths) {
  KinematicHardeningNet k;
  k.net = init_net(constrained ? Flavor::PositiveMonotoneConvex : Flavor::Unconstrained, seed,
                   std::move(widths), Activation::Softplus);
  k.project();
  return k;
}

double R_of_r(const IsotropicHardeningNet& h, double r) { return h.R(r); }
double dR_dr(const IsotropicHardeningNet& h, double r) { return h.dR(r); }
double phi_of_xn(const KinematicHardeningNet& k, double xnorm2) { return k.phi(xnorm2); }
double dphi(const KinematicHardeningNet& k, double xnorm2) { return k.dphi(xnorm2); }

}  // namespace plastokit
