#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "plastokit/dataset.hpp"
#include "plastokit/implicit_step.hpp"
#include "plastokit/material.hpp"
#include "plastokit/reference_models.hpp"
#include "plastokit/return_map.hpp"

namespace plastokit {

/// Strain program plus the data stress at every increment.
struct PathProblem {
  std::vector<double> eps;
  std::vector<double> target;

  static PathProblem from(const LoadingPath& path, const UniaxialDataset& data);
};

struct PathEval {
  double loss = 0.0;
  std::vector<double> sigma11;
  std::vector<double> grad;
};

/// Sum of squared sig11 errors along a uniaxial path solved with kernel k at
/// parameters th; with want_grad the gradient w.r.t. th is obtained by
/// reverse accumulation of the per-step adjoints.
template <class K>
PathEval path_evaluate(const K& k, const std::vector<double>& th, const PathProblem& prob, bool want_grad,
                       const NewtonOptions& opt = {}) {
  constexpr int NS = K::kState;
  using State = std::array<double, NS>;
  using Out = StepOutput<NS, K::kUnknowns>;
  const std::size_t n = prob.eps.size();
  PathEval ev;
  ev.sigma11.resize(n);
  std::vector<State> states;
  std::vector<Out> outs;
  if (want_grad) {
    states.reserve(n + 1);
    outs.reserve(n);
  }
  State s{};
  const ElasticParams& el = k.elastic();
  for (std::size_t i = 0; i < n; ++i) {
    const std::array<double, 6> load{prob.eps[i], 0.0, 0.0, 0.0, 0.0, 0.0};
    Out out = solve_step(k, Control::Uniaxial, s.data(), th.data(), load.data(), opt);
    const double sig = elastic_stress(sym_at(out.state.data()), el)[0];
    ev.sigma11[i] = sig;
    const double d = sig - prob.target[i];
    ev.loss += d * d;
    if (want_grad) {
      states.push_back(s);
      out.info.history.clear();
      outs.push_back(out);
    }
    s = out.state;
  }
  if (!std::isfinite(ev.loss)) throw NonFinite("path loss is not finite");
  if (!want_grad) return ev;

  ev.grad.assign(th.size(), 0.0);
  const double lam = el.lambda(), two_mu = 2.0 * el.mu();
  State s_bar{}, s_bar_out{};
  for (std::size_t i = n; i-- > 0;) {
    s_bar_out = s_bar;
    const double d2 = 2.0 * (ev.sigma11[i] - prob.target[i]);
    s_bar_out[0] += d2 * (lam + two_mu);
    s_bar_out[1] += d2 * lam;
    s_bar_out[2] += d2 * lam;
    const std::array<double, 6> load{prob.eps[i], 0.0, 0.0, 0.0, 0.0, 0.0};
    step_adjoint(k, Control::Uniaxial, states[i].data(), th.data(), load.data(), outs[i], s_bar_out.data(),
                 s_bar.data(), ev.grad.data());
  }
  return ev;
}

/// Adaptive moments with decoupled weight decay.
struct AdamW {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m, v;
  long t = 0;

  void step(std::vector<double>& p, const std::vector<double>& g, const std::vector<double>& lr,
            const std::vector<double>& wd);
};

struct TrainConfig {
  int iterations = 300;
  double lr_net = 1e-2;
  double lr_material = 5e-2;
  double weight_decay = 1e-2;
  double activation_floor = 1e-6;
  int max_failures = 3;
  std::uint64_t seed = 0;
};

struct TrainRecord {
  std::vector<double> loss;
  std::vector<double> C;
  std::vector<std::string> events;
  double loss0 = 0.0;
  double best_loss = 0.0;
  int best_iter = 0;

  std::vector<double> relative_loss() const;
};

struct TrainResult {
  SurrogateModel model;
  TrainRecord record;
};

double path_loss(const SurrogateModel& model, const LoadingPath& path, const UniaxialDataset& data);

/// Iteration i evaluates the loss at the current parameters, records it and
/// then takes one optimizer step; the final parameters are evaluated too.
/// A failed forward solve reverts the step and halves the learning rates.
/// The step size of C is lr_material times max(1, |C|) of the initial model.
TrainResult train(const SurrogateModel& init, const LoadingPath& path, const UniaxialDataset& data,
                  const TrainConfig& cfg, const std::function<void(int, double, double)>& on_iter = {});

struct ErrorReport {
  double interpolation = 0.0;
  double extrapolation = 0.0;
  std::vector<double> eps;
  std::vector<double> sig_model;
  std::vector<double> sig_reference;
  int n_train = 0;
};

/// Relative L2 stress error of model against reference along test_path, split
/// at the end of train_path (test_path must extend train_path).
ErrorReport evaluate_extrapolation(const Material& model, const LoadingPath& train_path, const LoadingPath& test_path,
                                   const Material& reference);

struct ViolationCount {
  int inside = 0;
  int outside = 0;
  int total() const { return inside + outside; }
};

struct ConstraintViolations {
  ViolationCount R_increasing;
  ViolationCount phi_decreasing;
  ViolationCount phi_nonconvex;
  ViolationCount R_nonpositive;
  double r_hull = 0.0;
  double y_hull = 0.0;
  int total() const {
    return R_increasing.total() + phi_decreasing.total() + phi_nonconvex.total() + R_nonpositive.total();
  }
  int outside() const {
    return R_increasing.outside + phi_decreasing.outside + phi_nonconvex.outside + R_nonpositive.outside;
  }
};

/// Samples R on [0, span * r_hull] and phi on [0, span * y_hull], where the
/// hulls are the largest r and X:X the model reaches on the training path.
ConstraintViolations count_violations(const SurrogateModel& m, const LoadingPath& train_path, double span = 4.0,
                                      int samples = 400);

struct AblationArm {
  TrainResult trained;
  ErrorReport errors;
  ConstraintViolations violations;
};

struct AblationReport {
  AblationArm constrained;
  AblationArm unconstrained;
};

AblationReport ablate_constraints(const ElasticParams& el, double sigma_y, double C0, std::uint64_t seed,
                                  const LoadingPath& train_path, const LoadingPath& test_path,
                                  const UniaxialDataset& train_data, const Material& reference,
                                  const TrainConfig& cfg);

struct PhenomFitConfig {
  int iterations = 600;
  double lr = 5e-2;
  std::uint64_t seed = 0;
  bool start_at_truth = false;
};

struct PhenomFitResult {
  SingleNlkParams params;
  std::vector<double> loss;
  std::vector<std::array<double, 6>> history;
  double loss0 = 0.0;
};

/// Gradient fit of (C, gamma, m, H1, H2, H3) through the reference
/// integrator. Step sizes are set relative to the bound widths and the
/// parameters are clamped to the box after each step. base supplies E, nu, sigma_y and, with
/// start_at_truth, the starting point.
PhenomFitResult fit_phenomenological(const LoadingPath& path, const UniaxialDataset& data, const ParamBounds& bounds,
                                     const SingleNlkParams& base, const PhenomFitConfig& cfg);

}  // namespace plastokit
