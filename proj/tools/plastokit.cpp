#include <iostream>

#include "CLI11.hpp"

#include "plastokit/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Constitutive surrogate training and finite-element benchmarks"};
  app.set_version_flag("--version", PLASTOKIT_VERSION);
  app.require_subcommand(1);

  plastokit::RunOptions opt;
  std::uint64_t seed = 0;
  std::string out;
  int jobs = 1;
  const char* help[] = {"write a synthetic uniaxial dataset",  "train the surrogate model",
                        "evaluate a saved model",              "compare constrained and unconstrained training",
                        "fit the phenomenological parameters", "run the finite-element benchmarks"};
  std::vector<std::pair<CLI::App*, plastokit::Command>> subs;
  int i = 0;
  for (auto c : {plastokit::Command::Generate, plastokit::Command::Train, plastokit::Command::Evaluate,
                 plastokit::Command::Ablate, plastokit::Command::FitPhenom, plastokit::Command::Fem}) {
    CLI::App* s = app.add_subcommand(plastokit::to_string(c), help[i++]);
    s->add_option("--config", opt.config_file, "configuration file")->required()->check(CLI::ExistingFile);
    s->add_option("--seed", seed, "override experiment.seed");
    s->add_option("--out", out, "override experiment.out");
    s->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    subs.emplace_back(s, c);
  }
  CLI11_PARSE(app, argc, argv);

  for (const auto& [s, c] : subs) {
    if (!s->parsed()) continue;
    if (s->count("--seed")) opt.seed = seed;
    if (s->count("--out")) opt.out = out;
    if (s->count("--jobs")) opt.jobs = jobs;
    return plastokit::run(c, opt, std::cout, std::cerr);
  }
  return 1;
}
