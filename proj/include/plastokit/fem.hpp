#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "plastokit/material.hpp"

namespace plastokit {

/// Eight-node hexahedral mesh. Local node order: the bottom face
/// counter-clockwise, then the top face in the same order.
struct Mesh {
  std::vector<std::array<double, 3>> nodes;
  std::vector<std::array<int, 8>> hexes;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const { return static_cast<int>(hexes.size()); }
  void validate() const;

  /// Structured box [0,lx] x [0,ly] x [0,lz]; node (i,j,k) has index
  /// i + (nx+1) (j + (ny+1) k).
  static Mesh box(int nx, int ny, int nz, double lx, double ly, double lz);
  /// Tapered panel with corners (0,0), (48,44), (48,60), (0,44), extruded
  /// along z by thickness; same node numbering as box.
  static Mesh cook(int nx, int ny, int nz, double thickness = 1.0);
};

struct Dirichlet {
  int node = 0;
  int dof = 0;
  double value = 0.0;  // at full load
};

enum class Benchmark { Punch, Cook };

std::string to_string(Benchmark b);
Benchmark benchmark_from_string(const std::string& s);

struct FemConfig {
  Benchmark benchmark = Benchmark::Punch;
  double u0 = 0.015;
  int n_increments = 10;
  int max_iterations = 12;
  double tolerance = 1e-6;
  std::array<int, 3> divisions{4, 4, 4};
  /// Punch only: top nodes with x, y <= patch * edge length are displaced.
  double punch_patch = 1.0;
  int jobs = 1;

  static FemConfig defaults(Benchmark b);
  void validate() const;
};

struct FemProblem {
  Mesh mesh;
  std::vector<Dirichlet> bcs;
  std::array<double, 3> probe{};
};

FemProblem make_problem(const FemConfig& cfg);

/// Gauss-point geometry and the committed material store of a mesh.
class FemModel {
 public:
  FemModel(Mesh mesh, const Material& material);

  struct Assembly {
    Eigen::VectorXd f_int;
    Eigen::MatrixXd K;
    std::vector<MaterialUpdate> updates;  // per Gauss point
    std::vector<SymTensor3> eps;          // per Gauss point
  };

  /// Internal force (and tangent) at total displacement u, integrating every
  /// Gauss point from its committed state.
  Assembly assemble(const Eigen::VectorXd& u, bool with_tangent, int jobs = 1) const;
  /// Makes the states of a converged assembly the committed ones.
  void commit(const Assembly& a);

  const Mesh& mesh() const { return mesh_; }
  int num_dofs() const { return 3 * mesh_.num_nodes(); }
  int num_gauss_points() const { return static_cast<int>(weight_.size()); }
  double weight(int g) const { return weight_[static_cast<std::size_t>(g)]; }
  const std::array<double, 3>& gauss_position(int g) const { return xg_[static_cast<std::size_t>(g)]; }
  const std::vector<double>& state(int g) const { return state_[static_cast<std::size_t>(g)]; }
  const SymTensor3& committed_strain(int g) const { return eps_[static_cast<std::size_t>(g)]; }
  const SymTensor3& committed_stress(int g) const { return sig_[static_cast<std::size_t>(g)]; }
  double accumulated_dissipation() const { return dissipation_; }

 private:
  using BMat = Eigen::Matrix<double, 6, 24>;
  SymTensor3 strain_at(int g, const Eigen::VectorXd& u) const;

  Mesh mesh_;
  const Material* material_;
  std::vector<BMat> B_;
  std::vector<double> weight_;
  std::vector<std::array<double, 3>> xg_;
  std::vector<std::vector<double>> state_;
  std::vector<SymTensor3> eps_;
  std::vector<SymTensor3> sig_;
  double dissipation_ = 0.0;
};

struct ProbeSample {
  double strain_norm = 0.0;
  double stress_norm = 0.0;
};

struct FemResult {
  Mesh mesh;
  Eigen::VectorXd u;
  std::vector<std::vector<double>> relres;  // per increment, first entry 1
  std::vector<int> iterations;              // Newton iterations per increment
  std::vector<ProbeSample> probe;           // at the Gauss point nearest the probe
  std::vector<ProbeSample> average;         // volume-weighted averages
  std::vector<double> dissipation;          // accumulated after each increment
  std::string material;
};

/// Displacement-controlled run with a uniform ramp of the Dirichlet values.
FemResult run_benchmark(const FemConfig& cfg, const Material& material);

/// Volume-averaged strain norm vs stress norm per increment.
std::vector<ProbeSample> cook_summary(const FemResult& r);

void write_probe_csv(const std::vector<ProbeSample>& p, const std::string& file);
void write_convergence_csv(const FemResult& r, const std::string& file);
void write_field_csv(const FemResult& r, const std::string& file);

}  // namespace plastokit
