#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "plastokit/material.hpp"

namespace plastokit {

/// Piecewise-linear uniaxial strain program: each segment ramps eps11 from
/// the previous target to `target` in `increments` equal steps.
struct LoadingPath {
  struct Segment {
    double target = 0.0;
    int increments = 1;
  };
  std::vector<Segment> segments;

  static LoadingPath training_default();
  static LoadingPath testing_default();
  /// "[(0.0125, 125), (-0.0125, 250)]"
  static LoadingPath parse(const std::string& text);
  std::string to_string() const;

  void validate() const;
  int num_increments() const;
  /// eps11 after every increment (N_L values, the initial 0 excluded).
  std::vector<double> targets() const;
};

/// Ordered (eps11, sig11) samples split into monotone branches at load
/// reversals. Consecutive branches share their reversal sample.
struct UniaxialDataset {
  std::vector<double> eps;
  std::vector<double> sig;
  std::vector<int> branch_start;

  int size() const { return static_cast<int>(eps.size()); }
  int num_branches() const { return static_cast<int>(branch_start.size()); }
  int branch_end(int b) const { return b + 1 < num_branches() ? branch_start[static_cast<std::size_t>(b) + 1] : size() - 1; }
  void detect_branches();
};

/// Branch index of every increment of a strain sequence starting at 0.
std::vector<int> branch_of_increments(const std::vector<double>& eps_path);

UniaxialDataset load_dataset(const std::string& file);
void write_dataset(const UniaxialDataset& d, const std::string& file);

/// Runs the path on a fresh material point; sample 0 is the virgin state.
/// noise > 0 adds Gaussian scatter of standard deviation noise * sigma_y.
UniaxialDataset generate_uniaxial_dataset(const LoadingPath& path, const Material& material, double noise = 0.0,
                                          std::uint64_t seed = 0);

/// Dataset stress at every path increment, interpolated within the branch of
/// the same index.
std::vector<double> interpolate_targets(const UniaxialDataset& d, const std::vector<double>& eps_path);

}  // namespace plastokit
