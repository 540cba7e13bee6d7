#include "plastokit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace plastokit {

PathProblem PathProblem::from(const LoadingPath& path, const UniaxialDataset& data) {
  PathProblem p;
  p.eps = path.targets();
  p.target = interpolate_targets(data, p.eps);
  return p;
}

void AdamW::step(std::vector<double>& p, const std::vector<double>& g, const std::vector<double>& lr,
                 const std::vector<double>& wd) {
  const std::size_t n = p.size();
  if (g.size() != n || lr.size() != n || wd.size() != n) throw InvalidArgument("AdamW: size mismatch");
  if (m.size() != n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
  }
  ++t;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    p[i] -= lr[i] * wd[i] * p[i];
    p[i] -= lr[i] * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
  }
}

std::vector<double> TrainRecord::relative_loss() const {
  std::vector<double> out(loss.size());
  for (std::size_t i = 0; i < loss.size(); ++i) out[i] = loss0 > 0.0 ? loss[i] / loss0 : loss[i];
  return out;
}

double path_loss(const SurrogateModel& model, const LoadingPath& path, const UniaxialDataset& data) {
  return path_evaluate(SurrogateKernel(model), model.theta(), PathProblem::from(path, data), false).loss;
}

namespace {

bool is_step_failure(const std::exception& e) {
  return dynamic_cast<const NoConvergence*>(&e) || dynamic_cast<const NegativeMultiplier*>(&e) ||
         dynamic_cast<const SingularSystem*>(&e) || dynamic_cast<const NonFinite*>(&e) ||
         dynamic_cast<const DegenerateState*>(&e);
}

// Shared optimize loop: evaluate, record, step, project; revert and halve on
// a failed forward solve.
template <class Eval, class Project, class Record>
void optimize(std::vector<double>& x, int iterations, int max_failures, const std::vector<double>& lr,
              const std::vector<double>& wd, Eval&& eval, Project&& project, Record&& record,
              std::vector<std::string>* events) {
  AdamW opt;
  PathEval cur = eval(x);
  double scale = 1.0;
  for (int it = 0; it < iterations; ++it) {
    record(it, x, cur);
    const std::vector<double> prev = x;
    const AdamW prev_opt = opt;
    int failures = 0;
    for (;;) {
      x = prev;
      opt = prev_opt;
      std::vector<double> lr_s(lr);
      for (double& v : lr_s) v *= scale;
      opt.step(x, cur.grad, lr_s, wd);
      project(x);
      try {
        PathEval next = eval(x);
        cur = std::move(next);
        break;
      } catch (const std::exception& e) {
        if (!is_step_failure(e)) throw;
        ++failures;
        if (events) events->push_back("iteration " + std::to_string(it) + ": " + e.what() + "; step halved");
        if (failures >= max_failures)
          throw NoConvergence("training aborted after " + std::to_string(failures) +
                              " consecutive failed steps at iteration " + std::to_string(it) + ": " + e.what());
        scale *= 0.5;
      }
    }
  }
  record(iterations, x, cur);
}

}  // namespace

TrainResult train(const SurrogateModel& init, const LoadingPath& path, const UniaxialDataset& data,
                  const TrainConfig& cfg, const std::function<void(int, double, double)>& on_iter) {
  if (!(cfg.lr_net > 0.0) || !(cfg.lr_material > 0.0)) throw InvalidArgument("learning rates must be positive");
  if (cfg.iterations < 0) throw InvalidArgument("iteration count must be >= 0");
  SurrogateModel model = init;
  const SurrogateKernel k(model);
  const PathProblem prob = PathProblem::from(path, data);

  const auto groups = model.param_groups();
  std::vector<double> lr(groups.size()), wd(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    lr[i] = groups[i] == SurrogateModel::Group::Material ? cfg.lr_material * std::max(1.0, std::abs(init.C)) : cfg.lr_net;
    wd[i] = groups[i] == SurrogateModel::Group::NetWeight ? cfg.weight_decay : 0.0;
  }

  TrainResult res;
  TrainRecord& rec = res.record;
  std::vector<double> best;
  std::vector<double> th = model.theta();
  optimize(
      th, cfg.iterations, cfg.max_failures, lr, wd,
      [&](const std::vector<double>& x) { return path_evaluate(k, x, prob, true); },
      [&](std::vector<double>& x) {
        model.set_theta(x);
        model.project(cfg.activation_floor);
        x = model.theta();
      },
      [&](int it, const std::vector<double>& x, const PathEval& ev) {
        if (it == 0) {
          rec.loss0 = ev.loss;
          rec.best_loss = ev.loss;
          best = x;
        }
        rec.loss.push_back(ev.loss);
        rec.C.push_back(x[0]);
        if (ev.loss < rec.best_loss) {
          rec.best_loss = ev.loss;
          rec.best_iter = it;
          best = x;
        }
        if (on_iter) on_iter(it, ev.loss, x[0]);
      },
      &rec.events);
  res.model = init;
  res.model.set_theta(best);
  return res;
}

namespace {

std::vector<double> run_uniaxial(const Material& m, const std::vector<double>& eps) {
  std::vector<double> s = m.initial_state(), out;
  out.reserve(eps.size());
  for (double e : eps) {
    MaterialUpdate u = m.uniaxial_step(s, e);
    out.push_back(u.sigma[0]);
    s = std::move(u.state);
  }
  return out;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b, std::size_t from, std::size_t to) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

}  // namespace

ErrorReport evaluate_extrapolation(const Material& model, const LoadingPath& train_path, const LoadingPath& test_path,
                                   const Material& reference) {
  const std::vector<double> tr = train_path.targets();
  ErrorReport rep;
  rep.eps = test_path.targets();
  if (rep.eps.size() < tr.size() || !std::equal(tr.begin(), tr.end(), rep.eps.begin()))
    throw InvalidArgument("test path must extend the training path");
  rep.n_train = static_cast<int>(tr.size());
  rep.sig_model = run_uniaxial(model, rep.eps);
  rep.sig_reference = run_uniaxial(reference, rep.eps);
  rep.interpolation = rel_l2(rep.sig_model, rep.sig_reference, 0, tr.size());
  rep.extrapolation = rel_l2(rep.sig_model, rep.sig_reference, tr.size(), rep.eps.size());
  return rep;
}

ConstraintViolations count_violations(const SurrogateModel& m, const LoadingPath& train_path, double span,
                                      int samples) {
  ConstraintViolations cv;
  const auto mat = make_material(m);
  std::vector<double> s = mat->initial_state();
  for (double e : train_path.targets()) {
    s = mat->uniaxial_step(s, e).state;
    const SymTensor3 X = sym_at(s.data() + 12);
    cv.r_hull = std::max(cv.r_hull, s[18]);
    cv.y_hull = std::max(cv.y_hull, contract(X, X));
  }
  const double r_hull = std::max(cv.r_hull, 1e-6);
  const double y_hull = std::max(cv.y_hull, 1e-6);
  const auto& iso_p = m.iso.net.params();
  const auto& kin_p = m.kin.net.params();
  for (int i = 0; i < samples; ++i) {
    const double t = span * i / (samples - 1);
    const double r = t * r_hull;
    const double y = t * y_hull;
    const bool inside = t <= 1.0;
    auto bump = [inside](ViolationCount& c) { ++(inside ? c.inside : c.outside); };
    const Eval3<double> R = m.iso.eval(iso_p.data(), r);
    const Eval3<double> phi = m.kin.eval(kin_p.data(), y);
    if (R.d1 > 1e-10) bump(cv.R_increasing);
    if (R.v <= 0.0) bump(cv.R_nonpositive);
    if (phi.d1 < -1e-10) bump(cv.phi_decreasing);
    if (phi.d2 < -1e-8) bump(cv.phi_nonconvex);
  }
  return cv;
}

AblationReport ablate_constraints(const ElasticParams& el, double sigma_y, double C0, std::uint64_t seed,
                                  const LoadingPath& train_path, const LoadingPath& test_path,
                                  const UniaxialDataset& train_data, const Material& reference,
                                  const TrainConfig& cfg) {
  AblationReport rep;
  for (bool constrained : {true, false}) {
    AblationArm& arm = constrained ? rep.constrained : rep.unconstrained;
    arm.trained = train(make_surrogate(el, sigma_y, seed, constrained, C0), train_path, train_data, cfg);
    arm.errors = evaluate_extrapolation(*make_material(arm.trained.model), train_path, test_path, reference);
    arm.violations = count_violations(arm.trained.model, train_path);
  }
  return rep;
}

PhenomFitResult fit_phenomenological(const LoadingPath& path, const UniaxialDataset& data, const ParamBounds& bounds,
                                     const SingleNlkParams& base, const PhenomFitConfig& cfg) {
  bounds.validate();
  base.validate();
  if (!(cfg.lr > 0.0)) throw InvalidArgument("fit learning rate must be positive");
  const SingleNlkKernel k(base);
  const PathProblem prob = PathProblem::from(path, data);
  std::array<double, 6> span{};
  for (std::size_t i = 0; i < 6; ++i) span[i] = bounds.upper[i] - bounds.lower[i];

  // Adam steps scale with the learning rate, so a per-parameter rate of
  // lr * (upper - lower) is a step of lr in bound-normalized coordinates.
  std::vector<double> th(6), lr(6);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const auto truth = base.fit_vector();
  for (std::size_t i = 0; i < 6; ++i) {
    th[i] = cfg.start_at_truth ? truth[i] : bounds.lower[i] + uni(rng) * span[i];
    lr[i] = cfg.lr * span[i];
  }

  PhenomFitResult res;
  optimize(
      th, cfg.iterations, 3, lr, std::vector<double>(6, 0.0),
      [&](const std::vector<double>& x) { return path_evaluate(k, x, prob, true); },
      [&](std::vector<double>& x) {
        for (std::size_t i = 0; i < 6; ++i) x[i] = std::clamp(x[i], bounds.lower[i], bounds.upper[i]);
      },
      [&](int it, const std::vector<double>& x, const PathEval& ev) {
        if (it == 0) res.loss0 = ev.loss;
        res.loss.push_back(ev.loss);
        res.history.push_back({x[0], x[1], x[2], x[3], x[4], x[5]});
      },
      nullptr);
  res.params = base;
  res.params.set_fit_vector(res.history.back());
  return res;
}

}  // namespace plastokit
