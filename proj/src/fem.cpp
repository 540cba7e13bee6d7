#include "plastokit/fem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <thread>

namespace plastokit {

namespace {

constexpr std::array<std::array<double, 3>, 8> kCorner{{{-1, -1, -1},
                                                        {1, -1, -1},
                                                        {1, 1, -1},
                                                        {-1, 1, -1},
                                                        {-1, -1, 1},
                                                        {1, -1, 1},
                                                        {1, 1, 1},
                                                        {-1, 1, 1}}};

Mesh structured(int nx, int ny, int nz, const std::function<std::array<double, 3>(double, double, double)>& map) {
  if (nx < 1 || ny < 1 || nz < 1) throw InvalidArgument("mesh divisions must be >= 1");
  Mesh m;
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        m.nodes.push_back(map(static_cast<double>(i) / nx, static_cast<double>(j) / ny, static_cast<double>(k) / nz));
  auto id = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        m.hexes.push_back({id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k), id(i, j + 1, k), id(i, j, k + 1),
                           id(i + 1, j, k + 1), id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)});
  m.validate();
  return m;
}

double norm(const SymTensor3& a) { return std::sqrt(contract(a, a)); }

std::ofstream open_out(const std::string& file) {
  std::ofstream out(file);
  if (!out) throw InvalidArgument("cannot write " + file);
  out << std::setprecision(17);
  return out;
}

}  // namespace

void Mesh::validate() const {
  if (hexes.empty()) throw InvalidArgument("mesh has no elements");
  for (std::size_t e = 0; e < hexes.size(); ++e)
    for (int n : hexes[e])
      if (n < 0 || n >= num_nodes())
        throw InvalidArgument("element " + std::to_string(e) + " references node " + std::to_string(n));
}

Mesh Mesh::box(int nx, int ny, int nz, double lx, double ly, double lz) {
  return structured(nx, ny, nz, [=](double a, double b, double c) { return std::array<double, 3>{a * lx, b * ly, c * lz}; });
}

Mesh Mesh::cook(int nx, int ny, int nz, double thickness) {
  return structured(nx, ny, nz, [=](double a, double b, double c) {
    const double y = (1.0 - a) * 44.0 * b + a * (44.0 + 16.0 * b);
    return std::array<double, 3>{48.0 * a, y, thickness * c};
  });
}

std::string to_string(Benchmark b) { return b == Benchmark::Punch ? "punch" : "cook"; }

Benchmark benchmark_from_string(const std::string& s) {
  if (s == "punch") return Benchmark::Punch;
  if (s == "cook") return Benchmark::Cook;
  throw InvalidArgument("unknown benchmark '" + s + "'");
}

FemConfig FemConfig::defaults(Benchmark b) {
  FemConfig c;
  c.benchmark = b;
  if (b == Benchmark::Cook) {
    c.u0 = 0.3;
    c.divisions = {8, 8, 1};
  }
  return c;
}

void FemConfig::validate() const {
  if (n_increments < 1) throw InvalidArgument("n_increments must be >= 1");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (!std::isfinite(u0)) throw InvalidArgument("u0 must be finite");
  if (!(punch_patch > 0.0 && punch_patch <= 1.0)) throw InvalidArgument("punch_patch must lie in (0, 1]");
  if (jobs < 1) throw InvalidArgument("jobs must be >= 1");
  for (int d : divisions)
    if (d < 1) throw InvalidArgument("mesh divisions must be >= 1");
}

FemProblem make_problem(const FemConfig& cfg) {
  cfg.validate();
  const auto [nx, ny, nz] = cfg.divisions;
  FemProblem p;
  const double tol = 1e-9;
  if (cfg.benchmark == Benchmark::Punch) {
    p.mesh = Mesh::box(nx, ny, nz, 1.0, 1.0, 1.0);
    p.probe = {1.0, 1.0, 0.0};
    for (int n = 0; n < p.mesh.num_nodes(); ++n) {
      const auto& x = p.mesh.nodes[static_cast<std::size_t>(n)];
      if (x[2] < tol) {
        p.bcs.push_back({n, 2, 0.0});
        if (x[0] < tol && x[1] < tol) {
          p.bcs.push_back({n, 0, 0.0});
          p.bcs.push_back({n, 1, 0.0});
        } else if (x[0] > 1.0 - tol && x[1] < tol) {
          p.bcs.push_back({n, 1, 0.0});
        }
      }
      if (x[2] > 1.0 - tol && x[0] <= cfg.punch_patch + tol && x[1] <= cfg.punch_patch + tol)
        p.bcs.push_back({n, 2, -cfg.u0});
    }
  } else {
    p.mesh = Mesh::cook(nx, ny, nz);
    p.probe = {48.0, 52.0, 0.5};
    for (int n = 0; n < p.mesh.num_nodes(); ++n) {
      const auto& x = p.mesh.nodes[static_cast<std::size_t>(n)];
      if (x[0] < tol)
        for (int d = 0; d < 3; ++d) p.bcs.push_back({n, d, 0.0});
      if (x[0] > 48.0 - tol) p.bcs.push_back({n, 1, cfg.u0});
    }
  }
  return p;
}

FemModel::FemModel(Mesh mesh, const Material& material) : mesh_(std::move(mesh)), material_(&material) {
  mesh_.validate();
  const double gp = 1.0 / std::sqrt(3.0);
  for (int e = 0; e < mesh_.num_elements(); ++e) {
    const auto& conn = mesh_.hexes[static_cast<std::size_t>(e)];
    for (int q = 0; q < 8; ++q) {
      const std::array<double, 3> xi{kCorner[q][0] * gp, kCorner[q][1] * gp, kCorner[q][2] * gp};
      Eigen::Matrix<double, 8, 3> dN;
      Eigen::Matrix<double, 8, 1> N;
      for (int a = 0; a < 8; ++a) {
        const auto& c = kCorner[a];
        const double f0 = 1.0 + c[0] * xi[0], f1 = 1.0 + c[1] * xi[1], f2 = 1.0 + c[2] * xi[2];
        N(a) = 0.125 * f0 * f1 * f2;
        dN(a, 0) = 0.125 * c[0] * f1 * f2;
        dN(a, 1) = 0.125 * f0 * c[1] * f2;
        dN(a, 2) = 0.125 * f0 * f1 * c[2];
      }
      Eigen::Matrix<double, 8, 3> X;
      for (int a = 0; a < 8; ++a)
        for (int d = 0; d < 3; ++d) X(a, d) = mesh_.nodes[static_cast<std::size_t>(conn[a])][d];
      const Eigen::Matrix3d J = X.transpose() * dN;  // J(i, j) = dx_i / dxi_j
      const double det = J.determinant();
      if (!(det > 0.0))
        throw InvalidArgument("element " + std::to_string(e) + " gauss point " + std::to_string(q) +
                              " has non-positive Jacobian");
      const Eigen::Matrix<double, 8, 3> G = dN * J.inverse();
      BMat B = BMat::Zero();
      for (int a = 0; a < 8; ++a) {
        const int c = 3 * a;
        B(0, c) = G(a, 0);
        B(1, c + 1) = G(a, 1);
        B(2, c + 2) = G(a, 2);
        B(3, c) = 0.5 * G(a, 1);
        B(3, c + 1) = 0.5 * G(a, 0);
        B(4, c) = 0.5 * G(a, 2);
        B(4, c + 2) = 0.5 * G(a, 0);
        B(5, c + 1) = 0.5 * G(a, 2);
        B(5, c + 2) = 0.5 * G(a, 1);
      }
      B_.push_back(B);
      weight_.push_back(det);
      const Eigen::Vector3d xg = X.transpose() * N;
      xg_.push_back({xg(0), xg(1), xg(2)});
    }
  }
  state_.assign(weight_.size(), material.initial_state());
  eps_.assign(weight_.size(), SymTensor3::zero());
  sig_.assign(weight_.size(), SymTensor3::zero());
}

SymTensor3 FemModel::strain_at(int g, const Eigen::VectorXd& u) const {
  const auto& conn = mesh_.hexes[static_cast<std::size_t>(g / 8)];
  Eigen::Matrix<double, 24, 1> ue;
  for (int a = 0; a < 8; ++a)
    for (int d = 0; d < 3; ++d) ue(3 * a + d) = u(3 * conn[a] + d);
  const Eigen::Matrix<double, 6, 1> e = B_[static_cast<std::size_t>(g)] * ue;
  SymTensor3 t;
  for (int i = 0; i < 6; ++i) t.c[i] = e(i);
  return t;
}

FemModel::Assembly FemModel::assemble(const Eigen::VectorXd& u, bool with_tangent, int jobs) const {
  if (u.size() != num_dofs()) throw InvalidArgument("displacement vector has the wrong size");
  const int ne = mesh_.num_elements();
  Assembly a;
  a.updates.resize(weight_.size());
  a.eps.resize(weight_.size());
  std::vector<Eigen::Matrix<double, 24, 1>> fe(static_cast<std::size_t>(ne));
  std::vector<Eigen::Matrix<double, 24, 24>> ke(with_tangent ? static_cast<std::size_t>(ne) : 0u);
  // Shear rows carry tensor strains, so they count twice in sigma : eps.
  const Eigen::Matrix<double, 6, 1> wv = (Eigen::Matrix<double, 6, 1>() << 1, 1, 1, 2, 2, 2).finished();

  auto element = [&](int e) {
    Eigen::Matrix<double, 24, 1> f = Eigen::Matrix<double, 24, 1>::Zero();
    Eigen::Matrix<double, 24, 24> k = Eigen::Matrix<double, 24, 24>::Zero();
    for (int q = 0; q < 8; ++q) {
      const int g = 8 * e + q;
      const auto gi = static_cast<std::size_t>(g);
      a.eps[gi] = strain_at(g, u);
      try {
        a.updates[gi] = material_->strain_step(state_[gi], a.eps[gi] - eps_[gi], with_tangent);
      } catch (const Error& err) {
        throw NumericalFailure("element " + std::to_string(e) + " gauss point " + std::to_string(q) + ": " +
                               err.what());
      }
      const BMat& B = B_[gi];
      Eigen::Matrix<double, 6, 1> s;
      for (int i = 0; i < 6; ++i) s(i) = a.updates[gi].sigma.c[i] * wv(i);
      f += weight_[gi] * B.transpose() * s;
      if (with_tangent) k += weight_[gi] * B.transpose() * wv.asDiagonal() * a.updates[gi].tangent * B;
    }
    fe[static_cast<std::size_t>(e)] = f;
    if (with_tangent) ke[static_cast<std::size_t>(e)] = k;
  };

  const int nt = std::min(std::max(jobs, 1), ne);
  if (nt == 1) {
    for (int e = 0; e < ne; ++e) element(e);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        try {
          for (int e = t; e < ne; e += nt) element(e);
        } catch (...) {
          errs[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& ep : errs)
      if (ep) std::rethrow_exception(ep);
  }

  a.f_int = Eigen::VectorXd::Zero(num_dofs());
  if (with_tangent) a.K = Eigen::MatrixXd::Zero(num_dofs(), num_dofs());
  for (int e = 0; e < ne; ++e) {
    const auto& conn = mesh_.hexes[static_cast<std::size_t>(e)];
    for (int i = 0; i < 24; ++i) {
      const int I = 3 * conn[i / 3] + i % 3;
      a.f_int(I) += fe[static_cast<std::size_t>(e)](i);
      if (!with_tangent) continue;
      for (int j = 0; j < 24; ++j) a.K(I, 3 * conn[j / 3] + j % 3) += ke[static_cast<std::size_t>(e)](i, j);
    }
  }
  return a;
}

void FemModel::commit(const Assembly& a) {
  for (std::size_t g = 0; g < weight_.size(); ++g) {
    dissipation_ += weight_[g] * a.updates[g].dissipation;
    state_[g] = a.updates[g].state;
    eps_[g] = a.eps[g];
    sig_[g] = a.updates[g].sigma;
  }
}

FemResult run_benchmark(const FemConfig& cfg, const Material& material) {
  const FemProblem prob = make_problem(cfg);
  FemModel model(prob.mesh, material);
  const int n = model.num_dofs();

  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd target = Eigen::VectorXd::Zero(n);
  for (const Dirichlet& d : prob.bcs) {
    const int i = 3 * d.node + d.dof;
    fixed[static_cast<std::size_t>(i)] = 1;
    target(i) = d.value;
  }
  std::vector<int> free;
  for (int i = 0; i < n; ++i)
    if (!fixed[static_cast<std::size_t>(i)]) free.push_back(i);
  const int nf = static_cast<int>(free.size());

  int probe_gp = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int g = 0; g < model.num_gauss_points(); ++g) {
    const auto& x = model.gauss_position(g);
    const double d = std::hypot(x[0] - prob.probe[0], x[1] - prob.probe[1], x[2] - prob.probe[2]);
    if (d < best) {
      best = d;
      probe_gp = g;
    }
  }

  FemResult res;
  res.mesh = prob.mesh;
  res.material = material.name();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (int inc = 1; inc <= cfg.n_increments; ++inc) {
    const double lf = static_cast<double>(inc) / cfg.n_increments;
    // Linearized out-of-balance force of the Dirichlet increment about the
    // last converged configuration.
    FemModel::Assembly a = model.assemble(u, true, cfg.jobs);
    Eigen::VectorXd du_d = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      if (fixed[static_cast<std::size_t>(i)]) {
        du_d(i) = lf * target(i) - u(i);
        u(i) += du_d(i);
      }
    auto free_residual = [&](const Eigen::VectorXd& f) {
      Eigen::VectorXd r(nf);
      for (int i = 0; i < nf; ++i) r(i) = f(free[static_cast<std::size_t>(i)]);
      return r;
    };
    std::vector<double> log;
    Eigen::VectorXd r = free_residual(a.f_int + a.K * du_d);
    const double r0 = r.norm();
    log.push_back(1.0);
    int it = 0;
    bool converged = r0 == 0.0;
    while (!converged) {
      if (it == cfg.max_iterations)
        throw GlobalNoConvergence("increment " + std::to_string(inc) + ": relative residual " +
                                  std::to_string(log.back()) + " after " + std::to_string(it) + " iterations");
      Eigen::MatrixXd Kff(nf, nf);
      for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nf; ++j) Kff(i, j) = a.K(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Kff);
      const Eigen::VectorXd du = lu.solve(-r);
      if (!du.allFinite()) throw GlobalNoConvergence("increment " + std::to_string(inc) + ": singular stiffness");
      for (int i = 0; i < nf; ++i) u(free[static_cast<std::size_t>(i)]) += du(i);
      ++it;
      a = model.assemble(u, true, cfg.jobs);
      r = free_residual(a.f_int);
      log.push_back(r.norm() / r0);
      converged = log.back() <= cfg.tolerance;
    }
    model.commit(a);
    res.relres.push_back(std::move(log));
    res.iterations.push_back(it);

    res.probe.push_back({norm(model.committed_strain(probe_gp)), norm(model.committed_stress(probe_gp))});
    ProbeSample avg;
    double vol = 0.0;
    for (int g = 0; g < model.num_gauss_points(); ++g) {
      const double w = model.weight(g);
      vol += w;
      avg.strain_norm += w * norm(model.committed_strain(g));
      avg.stress_norm += w * norm(model.committed_stress(g));
    }
    avg.strain_norm /= vol;
    avg.stress_norm /= vol;
    res.average.push_back(avg);
    res.dissipation.push_back(model.accumulated_dissipation());
  }
  res.u = u;
  return res;
}

std::vector<ProbeSample> cook_summary(const FemResult& r) { return r.average; }

void write_probe_csv(const std::vector<ProbeSample>& p, const std::string& file) {
  std::ofstream out = open_out(file);
  out << "increment,strain_norm,stress_norm\n";
  for (std::size_t i = 0; i < p.size(); ++i) out << i + 1 << ',' << p[i].strain_norm << ',' << p[i].stress_norm << '\n';
}

void write_convergence_csv(const FemResult& r, const std::string& file) {
  std::ofstream out = open_out(file);
  out << "increment,iter,relres\n";
  for (std::size_t i = 0; i < r.relres.size(); ++i)
    for (std::size_t k = 0; k < r.relres[i].size(); ++k) out << i + 1 << ',' << k << ',' << r.relres[i][k] << '\n';
}

void write_field_csv(const FemResult& r, const std::string& file) {
  std::ofstream out = open_out(file);
  out << "node,x,y,z,ux,uy,uz\n";
  for (int n = 0; n < r.mesh.num_nodes(); ++n) {
    const auto& x = r.mesh.nodes[static_cast<std::size_t>(n)];
    out << n << ',' << x[0] << ',' << x[1] << ',' << x[2] << ',' << r.u(3 * n) << ',' << r.u(3 * n + 1) << ','
        << r.u(3 * n + 2) << '\n';
  }
}

}  // namespace plastokit
