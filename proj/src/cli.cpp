#include "plastokit/cli.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <thread>

#ifndef PLASTOKIT_VERSION
#define PLASTOKIT_VERSION "unknown"
#endif

namespace plastokit {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Command c) {
  switch (c) {
    case Command::Generate: return "generate";
    case Command::Train: return "train";
    case Command::Evaluate: return "evaluate";
    case Command::Ablate: return "ablate";
    case Command::FitPhenom: return "fit-phenom";
    case Command::Fem: return "fem";
  }
  return "?";
}

Command command_from_string(const std::string& s) {
  for (Command c : {Command::Generate, Command::Train, Command::Evaluate, Command::Ablate, Command::FitPhenom,
                    Command::Fem})
    if (to_string(c) == s) return c;
  throw InvalidArgument("unknown command '" + s + "'");
}

std::unique_ptr<Material> ReferenceSpec::make() const {
  if (model == "single-nlk") return make_material(single);
  if (model == "multi-nlk") return make_material(multi);
  throw InvalidArgument("this command needs a [reference] model");
}

ElasticParams ReferenceSpec::elastic() const { return model == "multi-nlk" ? multi.elastic() : single.elastic(); }

double ReferenceSpec::sigma_y() const { return model == "multi-nlk" ? multi.k : single.sigma_y; }

std::string ExperimentConfig::resolve(const std::string& file) const {
  const fs::path p(file);
  return p.is_absolute() ? file : (fs::path(base_dir) / p).string();
}

ExperimentConfig ExperimentConfig::from(const Config& c, Command cmd, const std::string& base_dir) {
  ExperimentConfig e;
  e.command = cmd;
  e.base_dir = base_dir;
  e.echo = c.values();
  e.seed = static_cast<std::uint64_t>(c.get_int("experiment.seed", 0));
  e.out = e.resolve(c.get_string("experiment.out", "out"));
  e.jobs = static_cast<int>(c.get_int("experiment.jobs", 1));
  if (e.jobs < 1) throw InvalidArgument("experiment.jobs must be >= 1");

  e.reference.model = c.get_string("reference.model", "none");
  if (e.reference.model == "single-nlk") {
    SingleNlkParams& p = e.reference.single;
    p.E = c.get_double("reference.E", p.E);
    p.nu = c.get_double("reference.nu", p.nu);
    p.sigma_y = c.get_double("reference.sigma_y", p.sigma_y);
    p.C = c.get_double("reference.C", p.C);
    p.gamma = c.get_double("reference.gamma", p.gamma);
    p.m = c.get_double("reference.m", p.m);
    p.H1 = c.get_double("reference.H1", p.H1);
    p.H2 = c.get_double("reference.H2", p.H2);
    p.H3 = c.get_double("reference.H3", p.H3);
    p.validate();
  } else if (e.reference.model == "multi-nlk") {
    MultiNlkParams& p = e.reference.multi;
    p.E = c.get_double("reference.E", p.E);
    p.nu = c.get_double("reference.nu", p.nu);
    for (int i = 0; i < 3; ++i) {
      const std::string n = std::to_string(i + 1);
      p.C[static_cast<std::size_t>(i)] = c.get_double("reference.C" + n, p.C[static_cast<std::size_t>(i)]);
      p.gamma[static_cast<std::size_t>(i)] = c.get_double("reference.gamma" + n, p.gamma[static_cast<std::size_t>(i)]);
    }
    p.b = c.get_double("reference.b", p.b);
    p.Q_M = c.get_double("reference.Q_M", p.Q_M);
    p.Q_0 = c.get_double("reference.Q_0", p.Q_0);
    p.mu = c.get_double("reference.mu", p.mu);
    p.k = c.get_double("reference.k", p.k);
    p.m = c.get_double("reference.m", p.m);
    p.validate();
  } else if (e.reference.model != "none") {
    throw InvalidArgument("reference.model must be single-nlk, multi-nlk or none");
  }

  e.data_file = c.get_string("data.file", "");
  e.noise = c.get_double("data.noise", 0.0);
  if (!(e.noise >= 0.0)) throw InvalidArgument("data.noise must be >= 0");
  if (c.has("path.train")) e.train_path = LoadingPath::parse(c.get_string("path.train"));
  if (c.has("path.test")) e.test_path = LoadingPath::parse(c.get_string("path.test"));

  if (e.reference.present()) {
    e.surrogate_elastic = e.reference.elastic();
    e.surrogate_sigma_y = e.reference.sigma_y();
  }
  e.surrogate_elastic.E = c.get_double("surrogate.E", e.surrogate_elastic.E);
  e.surrogate_elastic.nu = c.get_double("surrogate.nu", e.surrogate_elastic.nu);
  e.surrogate_sigma_y = c.get_double("surrogate.sigma_y", e.surrogate_sigma_y);
  e.surrogate_elastic.validate();
  if (!(e.surrogate_sigma_y > 0.0)) throw InvalidArgument("surrogate.sigma_y must be positive");
  e.C0 = c.get_double("surrogate.C0", e.C0);
  e.constrained = c.get_bool("surrogate.constrained", true);
  e.model_file = c.get_string("surrogate.model", "");
  e.seeds = static_cast<int>(c.get_int("surrogate.seeds", 1));
  if (e.seeds < 1) throw InvalidArgument("surrogate.seeds must be >= 1");

  e.train.iterations = static_cast<int>(c.get_int("train.iterations", e.train.iterations));
  e.train.lr_net = c.get_double("train.lr_net", e.train.lr_net);
  e.train.lr_material = c.get_double("train.lr_material", e.train.lr_material);
  e.train.weight_decay = c.get_double("train.weight_decay", e.train.weight_decay);
  e.train.activation_floor = c.get_double("train.activation_floor", e.train.activation_floor);
  e.train.max_failures = static_cast<int>(c.get_int("train.max_failures", e.train.max_failures));

  e.fit.iterations = static_cast<int>(c.get_int("fit.iterations", e.fit.iterations));
  e.fit.lr = c.get_double("fit.lr", e.fit.lr);
  e.fit.start_at_truth = c.get_bool("fit.start_at_truth", false);
  const char* names[6] = {"C", "gamma", "m", "H1", "H2", "H3"};
  for (std::size_t i = 0; i < 6; ++i) {
    e.bounds.lower[i] = c.get_double(std::string("fit.") + names[i] + "_min", e.bounds.lower[i]);
    e.bounds.upper[i] = c.get_double(std::string("fit.") + names[i] + "_max", e.bounds.upper[i]);
  }
  e.bounds.validate();

  e.fem_benchmark = c.get_string("fem.benchmark", "punch");
  if (e.fem_benchmark != "punch" && e.fem_benchmark != "cook" && e.fem_benchmark != "both")
    throw InvalidArgument("fem.benchmark must be punch, cook or both");
  e.fem_material = c.get_string("fem.material", "both");
  if (e.fem_material != "reference" && e.fem_material != "surrogate" && e.fem_material != "both")
    throw InvalidArgument("fem.material must be reference, surrogate or both");
  for (auto* f : {&e.fem_punch, &e.fem_cook}) {
    const std::string s = f->benchmark == Benchmark::Punch ? "fem.punch_" : "fem.cook_";
    f->u0 = c.get_double(s + "u0", f->u0);
    const auto d = c.get_ints(s + "divisions", {f->divisions[0], f->divisions[1], f->divisions[2]});
    if (d.size() != 3) throw InvalidArgument(s + "divisions needs three integers");
    f->divisions = {d[0], d[1], d[2]};
    f->n_increments = static_cast<int>(c.get_int("fem.increments", f->n_increments));
    f->max_iterations = static_cast<int>(c.get_int("fem.max_iterations", f->max_iterations));
    f->tolerance = c.get_double("fem.tolerance", f->tolerance);
    f->jobs = e.jobs;
  }
  e.fem_punch.punch_patch = c.get_double("fem.punch_patch", e.fem_punch.punch_patch);
  e.fem_punch.validate();
  e.fem_cook.validate();

  c.check_all_used();
  if (!e.data_file.empty() && !fs::exists(e.resolve(e.data_file)))
    throw InvalidArgument("data file " + e.resolve(e.data_file) + " does not exist");
  if (!e.model_file.empty() && !fs::exists(e.resolve(e.model_file)))
    throw InvalidArgument("model file " + e.resolve(e.model_file) + " does not exist");
  return e;
}

namespace {

// Runs f(0..n-1) on up to jobs threads; the first failure (by index) is
// rethrown after all workers finish.
template <class F>
void parallel_for(int n, int jobs, F&& f) {
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i; (i = next++) < n;) {
      try {
        f(i);
      } catch (...) {
        errs[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int nt = std::max(1, std::min(jobs, n));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    const fs::path p = dir_ / name;
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw InvalidArgument("cannot write " + p.string());
    out << std::setprecision(17);
    files_.push_back(name);
    return out;
  }
  std::string path(const std::string& name) {
    files_.push_back(name);
    const fs::path p = dir_ / name;
    fs::create_directories(p.parent_path());
    return p.string();
  }
  const std::vector<std::string>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

UniaxialDataset training_data(const ExperimentConfig& c) {
  if (!c.data_file.empty()) return load_dataset(c.resolve(c.data_file));
  if (!c.reference.present()) throw InvalidArgument("training data needs data.file or a [reference] model");
  return generate_uniaxial_dataset(c.train_path, *c.reference.make(), c.noise, c.seed);
}

void write_record(const TrainRecord& r, std::ofstream out) {
  out << "iter,loss,rel_loss,C\n";
  const auto rel = r.relative_loss();
  for (std::size_t i = 0; i < r.loss.size(); ++i) out << i << ',' << r.loss[i] << ',' << rel[i] << ',' << r.C[i] << '\n';
}

void write_predictions(const ErrorReport& e, std::ofstream out, const char* ref_name = "sig_reference") {
  out << "step,eps11,sig_model," << ref_name << ",phase\n";
  for (std::size_t i = 0; i < e.eps.size(); ++i)
    out << i + 1 << ',' << e.eps[i] << ',' << e.sig_model[i] << ',' << e.sig_reference[i] << ','
        << (static_cast<int>(i) < e.n_train ? "train" : "extrapolation") << '\n';
}

json errors_json(const ErrorReport& e) {
  return {{"interpolation", e.interpolation}, {"extrapolation", e.extrapolation}};
}

json violations_json(const ConstraintViolations& v) {
  auto one = [](const ViolationCount& c) { return json{{"inside", c.inside}, {"outside", c.outside}}; };
  return {{"R_increasing", one(v.R_increasing)},     {"R_nonpositive", one(v.R_nonpositive)},
          {"phi_decreasing", one(v.phi_decreasing)}, {"phi_nonconvex", one(v.phi_nonconvex)},
          {"total", v.total()},                      {"outside_total", v.outside()},
          {"r_hull", v.r_hull},                      {"y_hull", v.y_hull}};
}

// Model response against the dataset itself when no reference model exists.
ErrorReport compare_with_data(const Material& m, const LoadingPath& path, const UniaxialDataset& d) {
  ErrorReport e;
  e.eps = path.targets();
  e.sig_reference = interpolate_targets(d, e.eps);
  std::vector<double> s = m.initial_state();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < e.eps.size(); ++i) {
    MaterialUpdate u = m.uniaxial_step(s, e.eps[i]);
    e.sig_model.push_back(u.sigma.c[0]);
    s = std::move(u.state);
    num += (e.sig_model[i] - e.sig_reference[i]) * (e.sig_model[i] - e.sig_reference[i]);
    den += e.sig_reference[i] * e.sig_reference[i];
  }
  e.n_train = static_cast<int>(e.eps.size());
  e.interpolation = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return e;
}

void write_hardening(const SurrogateModel& m, const ConstraintViolations& v, std::ofstream out) {
  out << "t,r,R,y,phi\n";
  const double rh = std::max(v.r_hull, 1e-6), yh = std::max(v.y_hull, 1e-6);
  for (int i = 0; i <= 200; ++i) {
    const double t = 4.0 * i / 200.0;
    out << t << ',' << t * rh << ',' << m.iso.R(t * rh) << ',' << t * yh << ',' << m.kin.phi(t * yh) << '\n';
  }
}

json run_generate(const ExperimentConfig& c, Artifacts& a) {
  const auto ref = c.reference.make();
  const UniaxialDataset train = generate_uniaxial_dataset(c.train_path, *ref, c.noise, c.seed);
  write_dataset(train, a.path("data_train.csv"));
  json r{{"train_rows", train.size()}, {"train_branches", train.num_branches()}};
  if (c.test_path) {
    const UniaxialDataset test = generate_uniaxial_dataset(*c.test_path, *ref, c.noise, c.seed + 1);
    write_dataset(test, a.path("data_test.csv"));
    r["test_rows"] = test.size();
  }
  return r;
}

json run_train(const ExperimentConfig& c, Artifacts& a) {
  const UniaxialDataset data = training_data(c);
  std::vector<TrainResult> results(static_cast<std::size_t>(c.seeds));
  parallel_for(c.seeds, c.jobs, [&](int i) {
    TrainConfig tc = c.train;
    tc.seed = c.seed + static_cast<std::uint64_t>(i);
    const SurrogateModel init = make_surrogate(c.surrogate_elastic, c.surrogate_sigma_y, tc.seed, c.constrained, c.C0);
    results[static_cast<std::size_t>(i)] = train(init, c.train_path, data, tc);
  });
  const std::unique_ptr<Material> ref = c.reference.present() ? c.reference.make() : nullptr;
  json runs = json::array();
  for (int i = 0; i < c.seeds; ++i) {
    const TrainResult& t = results[static_cast<std::size_t>(i)];
    const std::string pre = c.seeds == 1 ? "" : "seed_" + std::to_string(c.seed + static_cast<std::uint64_t>(i)) + "/";
    std::ofstream(a.path(pre + "model.json")) << std::setw(2) << t.model.to_json() << '\n';
    write_record(t.record, a.open(pre + "train_record.csv"));
    json run{{"seed", c.seed + static_cast<std::uint64_t>(i)},
             {"loss0", t.record.loss0},
             {"best_loss", t.record.best_loss},
             {"best_iter", t.record.best_iter},
             {"relative_loss", t.record.loss0 > 0.0 ? t.record.best_loss / t.record.loss0 : 0.0},
             {"C", t.model.C},
             {"uniaxial_kinematic_modulus", 3.0 * t.model.C},
             {"events", t.record.events}};
    const auto mat = make_material(t.model);
    if (ref) {
      const ErrorReport e = evaluate_extrapolation(*mat, c.train_path, c.test_path.value_or(c.train_path), *ref);
      write_predictions(e, a.open(pre + "predictions.csv"));
      run["errors"] = errors_json(e);
    } else {
      const ErrorReport e = compare_with_data(*mat, c.train_path, data);
      write_predictions(e, a.open(pre + "predictions.csv"), "sig_data");
      run["errors"] = errors_json(e);
    }
    runs.push_back(run);
  }
  return {{"runs", runs}};
}

SurrogateModel load_model(const ExperimentConfig& c, const std::string& fallback) {
  const std::string file = c.model_file.empty() ? fallback : c.resolve(c.model_file);
  std::ifstream in(file);
  if (!in) throw InvalidArgument("cannot open model file " + file);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("model file " + file + ": " + e.what());
  }
  return SurrogateModel::from_json(j);
}

json run_evaluate(const ExperimentConfig& c, Artifacts& a) {
  const SurrogateModel m = load_model(c, (a.dir() / "model.json").string());
  const auto mat = make_material(m);
  ErrorReport e;
  if (c.reference.present()) {
    e = evaluate_extrapolation(*mat, c.train_path, c.test_path.value_or(c.train_path), *c.reference.make());
    write_predictions(e, a.open("evaluation.csv"));
  } else {
    e = compare_with_data(*mat, c.train_path, training_data(c));
    write_predictions(e, a.open("evaluation.csv"), "sig_data");
  }
  return {{"errors", errors_json(e)}, {"C", m.C}};
}

json run_ablate(const ExperimentConfig& c, Artifacts& a) {
  const auto ref = c.reference.make();
  const UniaxialDataset data = training_data(c);
  const LoadingPath test = c.test_path.value_or(LoadingPath::testing_default());
  AblationArm arms[2];
  TrainConfig tc = c.train;
  tc.seed = c.seed;
  parallel_for(2, c.jobs, [&](int i) {
    AblationArm& arm = arms[i];
    arm.trained = train(make_surrogate(c.surrogate_elastic, c.surrogate_sigma_y, c.seed, i == 0, c.C0), c.train_path,
                        data, tc);
    arm.errors = evaluate_extrapolation(*make_material(arm.trained.model), c.train_path, test, *ref);
    arm.violations = count_violations(arm.trained.model, c.train_path);
  });
  json r;
  std::ofstream summary = a.open("ablation.csv");
  summary << "arm,best_loss,relative_loss,C,interpolation,extrapolation,violations_inside,violations_outside\n";
  for (int i = 0; i < 2; ++i) {
    const std::string name = i == 0 ? "constrained" : "unconstrained";
    const AblationArm& arm = arms[i];
    const TrainRecord& rec = arm.trained.record;
    std::ofstream(a.path("model_" + name + ".json")) << std::setw(2) << arm.trained.model.to_json() << '\n';
    write_record(rec, a.open("train_record_" + name + ".csv"));
    write_predictions(arm.errors, a.open("predictions_" + name + ".csv"));
    write_hardening(arm.trained.model, arm.violations, a.open("hardening_" + name + ".csv"));
    summary << name << ',' << rec.best_loss << ',' << rec.best_loss / rec.loss0 << ',' << arm.trained.model.C << ','
            << arm.errors.interpolation << ',' << arm.errors.extrapolation << ','
            << arm.violations.total() - arm.violations.outside() << ',' << arm.violations.outside() << '\n';
    r[name] = {{"best_loss", rec.best_loss},
               {"relative_loss", rec.best_loss / rec.loss0},
               {"C", arm.trained.model.C},
               {"errors", errors_json(arm.errors)},
               {"violations", violations_json(arm.violations)},
               {"events", rec.events}};
  }
  return r;
}

json run_fit_phenom(const ExperimentConfig& c, Artifacts& a) {
  if (c.reference.model != "single-nlk") throw InvalidArgument("fit-phenom needs reference.model = single-nlk");
  const UniaxialDataset data = training_data(c);
  const int n = c.seeds;
  std::vector<PhenomFitResult> fits(static_cast<std::size_t>(n));
  std::vector<TrainResult> nets(static_cast<std::size_t>(n));
  parallel_for(2 * n, c.jobs, [&](int k) {
    const int i = k / 2;
    const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(i);
    if (k % 2 == 0) {
      PhenomFitConfig fc = c.fit;
      fc.seed = seed;
      fits[static_cast<std::size_t>(i)] = fit_phenomenological(c.train_path, data, c.bounds, c.reference.single, fc);
    } else {
      TrainConfig tc = c.train;
      tc.iterations = c.fit.iterations;
      tc.seed = seed;
      nets[static_cast<std::size_t>(i)] =
          train(make_surrogate(c.surrogate_elastic, c.surrogate_sigma_y, seed, c.constrained, c.C0), c.train_path,
                data, tc);
    }
  });

  const std::size_t len = static_cast<std::size_t>(c.fit.iterations) + 1;
  std::ofstream traces = a.open("fit_phenom_traces.csv");
  traces << "iter,pipeline,seed,loss\n";
  std::vector<double> mean_fit(len, 0.0), mean_net(len, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto& f = fits[static_cast<std::size_t>(i)].loss;
    const auto& t = nets[static_cast<std::size_t>(i)].record.loss;
    for (std::size_t k = 0; k < len; ++k) {
      traces << k << ",phenomenological," << c.seed + static_cast<std::uint64_t>(i) << ',' << f[k] << '\n';
      mean_fit[k] += f[k] / n;
    }
    for (std::size_t k = 0; k < len; ++k) {
      traces << k << ",surrogate," << c.seed + static_cast<std::uint64_t>(i) << ',' << t[k] << '\n';
      mean_net[k] += t[k] / n;
    }
  }
  std::ofstream mean = a.open("fit_phenom_mean.csv");
  mean << "iter,phenomenological,surrogate\n";
  for (std::size_t k = 0; k < len; ++k) mean << k << ',' << mean_fit[k] << ',' << mean_net[k] << '\n';

  std::ofstream params = a.open("fit_phenom_params.csv");
  params << "seed,C,gamma,m,H1,H2,H3,final_loss\n";
  for (int i = 0; i < n; ++i) {
    const auto& f = fits[static_cast<std::size_t>(i)];
    const auto v = f.params.fit_vector();
    params << c.seed + static_cast<std::uint64_t>(i);
    for (double x : v) params << ',' << x;
    params << ',' << f.loss.back() << '\n';
  }
  return {{"seeds", n},
          {"iterations", c.fit.iterations},
          {"final_mean_phenomenological", mean_fit.back()},
          {"final_mean_surrogate", mean_net.back()}};
}

json run_fem(const ExperimentConfig& c, Artifacts& a) {
  std::vector<std::pair<std::string, std::unique_ptr<Material>>> mats;
  if (c.fem_material != "surrogate") mats.emplace_back("reference", c.reference.make());
  if (c.fem_material != "reference") {
    SurrogateModel m = c.model_file.empty()
                           ? make_surrogate(c.surrogate_elastic, c.surrogate_sigma_y, c.seed, c.constrained, c.C0)
                           : load_model(c, "");
    mats.emplace_back("surrogate", make_material(m));
  }
  std::vector<const FemConfig*> benches;
  if (c.fem_benchmark != "cook") benches.push_back(&c.fem_punch);
  if (c.fem_benchmark != "punch") benches.push_back(&c.fem_cook);

  json r;
  for (const FemConfig* f : benches) {
    const std::string b = to_string(f->benchmark);
    std::vector<FemResult> res;
    json runs;
    for (const auto& [name, mat] : mats) {
      res.push_back(run_benchmark(*f, *mat));
      const FemResult& fr = res.back();
      const std::string tag = b + "_" + name;
      write_field_csv(fr, a.path("field_" + tag + ".csv"));
      write_convergence_csv(fr, a.path("convergence_" + tag + ".csv"));
      write_probe_csv(fr.probe, a.path("probe_" + tag + ".csv"));
      write_probe_csv(cook_summary(fr), a.path("average_" + tag + ".csv"));
      runs[name] = {{"iterations", fr.iterations}, {"dissipation", fr.dissipation.back()}};
    }
    r[b] = runs;
    if (res.size() == 2) {
      const double scale = res[0].u.cwiseAbs().maxCoeff();
      const double du = (res[1].u - res[0].u).cwiseAbs().maxCoeff();
      int diff = 0;
      for (std::size_t k = 0; k < res[0].iterations.size(); ++k)
        diff = std::max(diff, std::abs(res[1].iterations[k] - res[0].iterations[k]));
      double curve = 0.0;
      for (std::size_t k = 0; k < res[0].average.size(); ++k) {
        const auto& p = res[0].average[k];
        const auto& q = res[1].average[k];
        if (p.stress_norm > 0.0) curve = std::max(curve, std::abs(q.stress_norm - p.stress_norm) / p.stress_norm);
      }
      r[b]["comparison"] = {{"displacement_rel_linf", scale > 0.0 ? du / scale : du},
                            {"max_iteration_difference", diff},
                            {"average_stress_rel_diff", curve}};
    }
  }
  return r;
}

std::string error_kind(const std::exception& e) {
#define PLASTOKIT_KIND(T) \
  if (dynamic_cast<const T*>(&e)) return #T;
  PLASTOKIT_KIND(ParseError)
  PLASTOKIT_KIND(InvalidArgument)
  PLASTOKIT_KIND(EmptyDataset)
  PLASTOKIT_KIND(NonFiniteValue)
  PLASTOKIT_KIND(PathOutsideData)
  PLASTOKIT_KIND(NoConvergence)
  PLASTOKIT_KIND(NegativeMultiplier)
  PLASTOKIT_KIND(SingularSystem)
  PLASTOKIT_KIND(NonFinite)
  PLASTOKIT_KIND(DegenerateState)
  PLASTOKIT_KIND(GlobalNoConvergence)
  PLASTOKIT_KIND(NumericalFailure)
  PLASTOKIT_KIND(ConstraintViolation)
  PLASTOKIT_KIND(Error)
#undef PLASTOKIT_KIND
  return "std::exception";
}

}  // namespace

json run_experiment(const ExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Artifacts a(c.out);
  json results;
  switch (c.command) {
    case Command::Generate: results = run_generate(c, a); break;
    case Command::Train: results = run_train(c, a); break;
    case Command::Evaluate: results = run_evaluate(c, a); break;
    case Command::Ablate: results = run_ablate(c, a); break;
    case Command::FitPhenom: results = run_fit_phenom(c, a); break;
    case Command::Fem: results = run_fem(c, a); break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json m{{"command", to_string(c.command)},
         {"version", PLASTOKIT_VERSION},
         {"seed", c.seed},
         {"jobs", c.jobs},
         {"config", c.echo},
         {"train_path", c.train_path.to_string()},
         {"test_path", c.test_path ? c.test_path->to_string() : ""},
         {"assumptions",
          {"increment counts per loading segment are configuration choices",
           "surrogate kinematic modulus C enters as X = 2 C alpha; its uniaxial hardening slope is 3 C",
           "reported relative losses are divided by the iteration-0 loss"}},
         {"results", results},
         {"artifacts", a.files()},
         {"wall_time_s", wall}};
  std::ofstream out(a.dir() / "manifest.json");
  out << std::setw(2) << m << '\n';
  return m;
}

int run(Command cmd, const RunOptions& opt, std::ostream& log, std::ostream& err) {
  std::string out_dir = opt.out.value_or("");
  try {
    const Config cfg = Config::load(opt.config_file);
    const std::string base = fs::path(opt.config_file).parent_path().string();
    ExperimentConfig e = ExperimentConfig::from(cfg, cmd, base.empty() ? "." : base);
    if (opt.seed) e.seed = *opt.seed;
    if (opt.out) e.out = *opt.out;
    if (opt.jobs) {
      if (*opt.jobs < 1) throw InvalidArgument("--jobs must be >= 1");
      e.jobs = *opt.jobs;
      e.fem_punch.jobs = e.fem_cook.jobs = e.jobs;
    }
    out_dir = e.out;
    const json m = run_experiment(e);
    log << to_string(cmd) << ": wrote " << m["artifacts"].size() << " artifacts to " << e.out << " in "
        << std::fixed << std::setprecision(1) << m["wall_time_s"].get<double>() << " s\n";
    return 0;
  } catch (const std::exception& e) {
    const std::string kind = error_kind(e);
    err << "plastokit " << to_string(cmd) << ": " << kind << ": " << e.what() << '\n';
    if (!out_dir.empty()) {
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      std::ofstream f(fs::path(out_dir) / "error.json");
      if (f) f << std::setw(2) << json{{"status", "error"}, {"command", to_string(cmd)}, {"type", kind}, {"message", e.what()}} << '\n';
    }
    const bool input = kind == "ParseError" || kind == "InvalidArgument" || kind == "EmptyDataset" ||
                       kind == "NonFiniteValue" || kind == "PathOutsideData";
    return input ? 2 : 3;
  }
}

}  // namespace plastokit
