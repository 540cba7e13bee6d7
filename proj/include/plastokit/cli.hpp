#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"

#include "plastokit/config.hpp"
#include "plastokit/dataset.hpp"
#include "plastokit/fem.hpp"
#include "plastokit/reference_models.hpp"
#include "plastokit/trainer.hpp"

namespace plastokit {

enum class Command { Generate, Train, Evaluate, Ablate, FitPhenom, Fem };

std::string to_string(Command c);
Command command_from_string(const std::string& s);

/// Ground-truth model selected by the [reference] section.
struct ReferenceSpec {
  std::string model = "none";  // single-nlk, multi-nlk or none
  SingleNlkParams single;
  MultiNlkParams multi;

  bool present() const { return model != "none"; }
  std::unique_ptr<Material> make() const;
  ElasticParams elastic() const;
  double sigma_y() const;
};

struct ExperimentConfig {
  Command command = Command::Train;
  std::uint64_t seed = 0;
  std::string out = "out";
  int jobs = 1;
  std::string base_dir = ".";  // relative file names resolve against it

  ReferenceSpec reference;
  std::string data_file;
  double noise = 0.0;
  LoadingPath train_path = LoadingPath::training_default();
  std::optional<LoadingPath> test_path;

  ElasticParams surrogate_elastic{200000.0, 0.3};
  double surrogate_sigma_y = 207.0;
  double C0 = 1.0;
  bool constrained = true;
  std::string model_file;
  int seeds = 1;

  TrainConfig train;
  PhenomFitConfig fit;
  ParamBounds bounds;

  std::string fem_benchmark = "punch";  // punch, cook or both
  std::string fem_material = "both";    // reference, surrogate or both
  FemConfig fem_punch = FemConfig::defaults(Benchmark::Punch);
  FemConfig fem_cook = FemConfig::defaults(Benchmark::Cook);

  std::map<std::string, std::string> echo;

  /// Reads every section the command uses; unknown keys are rejected.
  static ExperimentConfig from(const Config& cfg, Command cmd, const std::string& base_dir = ".");
  std::string resolve(const std::string& file) const;
};

/// Runs one experiment, writing artifacts and manifest.json to cfg.out.
/// Returns the manifest.
nlohmann::json run_experiment(const ExperimentConfig& cfg);

struct RunOptions {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
};

/// Command-line entry: loads the config, applies overrides, runs, and turns
/// failures into a nonzero status plus error.json in the output directory.
int run(Command cmd, const RunOptions& opt, std::ostream& log, std::ostream& err);

}  // namespace plastokit
