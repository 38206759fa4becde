#ifndef ROOMGEO_LAYERS_HPP
#define ROOMGEO_LAYERS_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "roomgeo/tensor.hpp"

namespace roomgeo {

enum class Mode { kTrain, kEval };

// Trainable tensor plus its gradient, both owned by a layer.
struct ParamRef {
  std::string name;
  Tensor* value = nullptr;
  Tensor* grad = nullptr;
};

// Persistent non-trainable tensor (batch-norm running statistics).
struct BufferRef {
  std::string name;
  Tensor* tensor = nullptr;
};

class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string name() const = 0;
  virtual Tensor forward(const Tensor& input, Mode mode) = 0;
  // Gradient of the loss w.r.t. this layer's input. Accumulates into the
  // layer's parameter gradients. Requires a preceding forward call.
  virtual Tensor backward(const Tensor& grad_out) = 0;

  virtual std::vector<ParamRef> parameters() { return {}; }
  virtual std::vector<BufferRef> buffers() { return {}; }
};

// 1-d convolution, no padding. With kernel == stride the input positions
// partition exactly and L must be divisible by the stride.
class Conv1d : public Layer {
 public:
  Conv1d(std::int64_t in_channels, std::int64_t out_channels, std::int64_t kernel = 4,
         std::int64_t stride = 4, std::string name = "conv1d");

  std::string name() const override { return name_; }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<ParamRef> parameters() override;

  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }
  std::int64_t in_channels() const { return in_channels_; }
  std::int64_t out_channels() const { return out_channels_; }
  std::int64_t kernel() const { return kernel_; }
  std::int64_t stride() const { return stride_; }

 private:
  std::string name_;
  std::int64_t in_channels_, out_channels_, kernel_, stride_;
  Tensor weight_;       // (Cout, Cin, k)
  Tensor bias_;         // (Cout)
  Tensor grad_weight_;
  Tensor grad_bias_;
  std::int64_t cached_n_ = 0;
  std::int64_t cached_len_ = 0;
  bool has_cache_ = false;
  // Input deinterleaved into kernel-phase planes, (n, Cin, k, L/stride).
  // With kernel == stride each plane is a unit-stride column view, which
  // keeps the hot loops vectorizable.
  std::vector<double> phase_planes_;
};

// Per-channel normalization over batch x length with affine scale/shift.
// Training uses the population (1/m) batch statistics and updates the
// running averages with momentum 0.1; evaluation uses the running averages.
class BatchNorm1d : public Layer {
 public:
  explicit BatchNorm1d(std::int64_t channels, double eps = 1e-5, double momentum = 0.1,
                       std::string name = "batchnorm1d");

  std::string name() const override { return name_; }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<ParamRef> parameters() override;
  std::vector<BufferRef> buffers() override;

  Tensor& gamma() { return gamma_; }
  Tensor& beta() { return beta_; }
  Tensor& running_mean() { return running_mean_; }
  Tensor& running_var() { return running_var_; }
  std::int64_t channels() const { return channels_; }

 private:
  std::string name_;
  std::int64_t channels_;
  double eps_, momentum_;
  Tensor gamma_, beta_;
  Tensor grad_gamma_, grad_beta_;
  Tensor running_mean_, running_var_;
  // Backward cache.
  Tensor cached_xhat_;
  std::vector<double> cached_inv_std_;
  Mode cached_mode_ = Mode::kTrain;
  bool has_cache_ = false;
};

class Relu : public Layer {
 public:
  explicit Relu(std::string name = "relu") : name_(std::move(name)) {}

  std::string name() const override { return name_; }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;

 private:
  std::string name_;
  std::vector<unsigned char> active_;  // forward pass sign mask
  std::vector<std::int64_t> cached_shape_;
  bool has_cache_ = false;
};

// Reshapes (n, ...) to (n, per-sample shape). Pure view change.
class Reshape : public Layer {
 public:
  explicit Reshape(std::vector<std::int64_t> per_sample_shape, std::string name = "reshape")
      : name_(std::move(name)), per_sample_shape_(std::move(per_sample_shape)) {}

  std::string name() const override { return name_; }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;

 private:
  std::string name_;
  std::vector<std::int64_t> per_sample_shape_;
  std::vector<std::int64_t> cached_input_shape_;
  bool has_cache_ = false;
};

// Fully connected: out = W x + b.
class Linear : public Layer {
 public:
  Linear(std::int64_t in_features, std::int64_t out_features, std::string name = "linear");

  std::string name() const override { return name_; }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<ParamRef> parameters() override;

  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }
  std::int64_t in_features() const { return in_features_; }
  std::int64_t out_features() const { return out_features_; }

 private:
  std::string name_;
  std::int64_t in_features_, out_features_;
  Tensor weight_;  // (out, in)
  Tensor bias_;    // (out)
  Tensor grad_weight_;
  Tensor grad_bias_;
  Tensor cached_input_;
  bool has_cache_ = false;
};

// Mean square error per output dimension, averaged over the batch.
// The scalar training loss is the sum of the per-dimension means.
struct MseResult {
  std::vector<double> per_dim;
  double scalar = 0.0;
};

MseResult mse_loss(const Tensor& pred, const Tensor& target);

// Gradient of MseResult::scalar w.r.t. pred: 2 (pred - target) / n.
Tensor mse_loss_backward(const Tensor& pred, const Tensor& target);

}  // namespace roomgeo

#endif  // ROOMGEO_LAYERS_HPP
