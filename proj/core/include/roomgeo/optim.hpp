#ifndef ROOMGEO_OPTIM_HPP
#define ROOMGEO_OPTIM_HPP

#include <cstdint>
#include <vector>

#include "roomgeo/layers.hpp"
#include "roomgeo/tensor.hpp"

namespace roomgeo {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over a fixed set of parameter/gradient pairs.
class Adam {
 public:
  explicit Adam(std::vector<ParamRef> params, AdamConfig cfg = {});

  // One update from the currently accumulated gradients.
  void step();
  void zero_grad();

  std::int64_t step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

  // First/second moment for the i-th parameter tensor (test hook).
  const Tensor& first_moment(std::size_t i) const { return m_.at(i); }
  const Tensor& second_moment(std::size_t i) const { return v_.at(i); }

 private:
  std::vector<ParamRef> params_;
  AdamConfig cfg_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::int64_t t_ = 0;
};

}  // namespace roomgeo

#endif  // ROOMGEO_OPTIM_HPP
