#include "plastokit/material.hpp"

namespace plastokit {

std::unique_ptr<Material> make_material(const SingleNlkParams& p) {
  p.validate();
  const auto v = p.fit_vector();
  return std::make_unique<KernelMaterial<SingleNlkKernel>>(SingleNlkKernel(p), std::vector<double>(v.begin(), v.end()),
                                                           "single-nlk");
}

std::unique_ptr<Material> make_material(const MultiNlkParams& p) {
  p.validate();
  return std::make_unique<KernelMaterial<MultiNlkKernel>>(MultiNlkKernel(p), p.theta(), "multi-nlk");
}

std::unique_ptr<Material> make_material(const SurrogateModel& m) {
  return std::make_unique<KernelMaterial<SurrogateKernel>>(SurrogateKernel(m), m.theta(), "surrogate");
}

}  // namespace plastokit
