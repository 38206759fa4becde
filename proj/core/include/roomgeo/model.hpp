#ifndef ROOMGEO_MODEL_HPP
#define ROOMGEO_MODEL_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "roomgeo/layers.hpp"
#include "roomgeo/tensor.hpp"

namespace roomgeo {

// The room-geometry regression network: six conv1d(k=4, s=4) blocks with
// batch norm and ReLU, channel progression 1-10-20-40-80-160-160, then two
// fully connected layers 160-40-3. Input is one raw 4096-sample impulse
// response per row; output is the ascending-sorted (Lx, Ly, Lz) estimate.
class GeometryModel {
 public:
  static constexpr std::int64_t kInputLength = 4096;
  static constexpr std::int64_t kOutputDims = 3;

  // Builds the stack with Kaiming-uniform (fan-in) weights drawn from `seed`;
  // batch-norm gamma = 1, beta = 0.
  explicit GeometryModel(std::uint64_t seed = 0);

  Tensor forward(const Tensor& input);          // (n, 4096) -> (n, 3)
  Tensor backward(const Tensor& grad_output);   // (n, 3) -> (n, 4096)

  void set_mode(Mode mode) { mode_ = mode; }
  Mode mode() const { return mode_; }

  std::vector<ParamRef> parameters();
  std::vector<BufferRef> buffers();
  void zero_grad();
  std::int64_t count_parameters();

  // Layer access for introspection (shape ladder, tests).
  std::vector<Layer*> layers();

  // Single-response estimate. Requires eval mode.
  std::array<double, 3> estimate(std::span<const double> rir);
  // Batched estimate, (n, 4096) -> (n, 3). Requires eval mode.
  Tensor estimate_batch(const Tensor& input);
  // Componentwise mean of the per-response estimates from one room.
  std::array<double, 3> estimate_averaged(const std::vector<std::vector<double>>& rirs);

  // Deep copy of every parameter and buffer, and its inverse.
  std::vector<Tensor> snapshot();
  void restore(const std::vector<Tensor>& snap);

  void save(const std::filesystem::path& path);
  static GeometryModel load(const std::filesystem::path& path);

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
  Mode mode_ = Mode::kTrain;
};

}  // namespace roomgeo

#endif  // ROOMGEO_MODEL_HPP
