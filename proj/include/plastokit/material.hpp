#pragma once

#include <memory>
#include <string>
#include <vector>

#include "plastokit/implicit_step.hpp"
#include "plastokit/reference_models.hpp"
#include "plastokit/return_map.hpp"

namespace plastokit {

struct MaterialUpdate {
  std::vector<double> state;
  SymTensor3 sigma;
  Mat6 tangent = Mat6::Zero();
  StepInfo info;
  double dissipation = 0.0;
};

/// Material point behind a flat state vector; used by dataset generation and
/// the finite-element driver.
class Material {
 public:
  virtual ~Material() = default;
  virtual std::string name() const = 0;
  virtual int state_size() const = 0;
  virtual const ElasticParams& elastic() const = 0;
  virtual double sigma_y() const = 0;
  std::vector<double> initial_state() const { return std::vector<double>(static_cast<std::size_t>(state_size()), 0.0); }

  virtual MaterialUpdate strain_step(const std::vector<double>& s, const SymTensor3& deps, bool with_tangent,
                                     const NewtonOptions& opt = {}) const = 0;
  virtual MaterialUpdate uniaxial_step(const std::vector<double>& s, double eps11_target,
                                       const NewtonOptions& opt = {}) const = 0;
  /// Plastic strain stored in every state at entries 6..11.
  static SymTensor3 plastic_strain(const std::vector<double>& s) { return sym_at(s.data() + 6); }
};

template <class K>
class KernelMaterial : public Material {
 public:
  KernelMaterial(K kernel, std::vector<double> theta, std::string name)
      : k_(std::move(kernel)), th_(std::move(theta)), name_(std::move(name)) {
    if (static_cast<int>(th_.size()) != k_.n_theta()) throw InvalidArgument("material parameter size mismatch");
  }

  std::string name() const override { return name_; }
  int state_size() const override { return K::kState; }
  const ElasticParams& elastic() const override { return k_.elastic(); }
  double sigma_y() const override { return k_.sigma_y(); }
  const K& kernel() const { return k_; }
  const std::vector<double>& theta() const { return th_; }

  MaterialUpdate strain_step(const std::vector<double>& s, const SymTensor3& deps, bool with_tangent,
                             const NewtonOptions& opt = {}) const override {
    check(s);
    const auto out = solve_step(k_, Control::Strain, s.data(), th_.data(), deps.c.data(), opt);
    MaterialUpdate u = finish(s, out);
    if (with_tangent) u.tangent = step_tangent(k_, s.data(), th_.data(), deps.c.data(), out);
    return u;
  }

  MaterialUpdate uniaxial_step(const std::vector<double>& s, double eps11_target,
                               const NewtonOptions& opt = {}) const override {
    check(s);
    const std::array<double, 6> load{eps11_target, 0.0, 0.0, 0.0, 0.0, 0.0};
    const auto out = solve_step(k_, Control::Uniaxial, s.data(), th_.data(), load.data(), opt);
    return finish(s, out);
  }

 private:
  void check(const std::vector<double>& s) const {
    if (static_cast<int>(s.size()) != K::kState) throw InvalidArgument("material state size mismatch");
  }

  MaterialUpdate finish(const std::vector<double>& s, const StepOutput<K::kState, K::kUnknowns>& out) const {
    MaterialUpdate u;
    u.state.assign(out.state.begin(), out.state.end());
    u.sigma = elastic_stress(sym_at(u.state.data()), k_.elastic());
    u.info = out.info;
    u.dissipation = out.info.plastic ? k_.dissipation(s.data(), u.state.data(), th_.data()) : 0.0;
    return u;
  }

  K k_;
  std::vector<double> th_;
  std::string name_;
};

std::unique_ptr<Material> make_material(const SingleNlkParams& p);
std::unique_ptr<Material> make_material(const MultiNlkParams& p);
std::unique_ptr<Material> make_material(const SurrogateModel& m);

}  // namespace plastokit
