#include "roomgeo/layers.hpp"

#include <cmath>

namespace roomgeo {

namespace {

void require_3d(const Tensor& t, const char* who) {
  if (t.ndim() != 3) {
    throw ShapeError(std::string(who) + ": expected rank-3 input, got " + t.shape_str());
  }
}

void require_cache(bool has_cache, const char* who) {
  if (!has_cache) {
    throw StateError(std::string(who) + ": backward called before forward");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv1d

Conv1d::Conv1d(std::int64_t in_channels, std::int64_t out_channels, std::int64_t kernel,
               std::int64_t stride, std::string name)
    : name_(std::move(name)),
      in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_(kernel),
      stride_(stride),
      weight_({out_channels, in_channels, kernel}),
      bias_({out_channels}),
      grad_weight_({out_channels, in_channels, kernel}),
      grad_bias_({out_channels}) {}

Tensor Conv1d::forward(const Tensor& input, Mode) {
  require_3d(input, "conv1d");
  const std::int64_t n = input.dim(0);
  const std::int64_t cin = input.dim(1);
  const std::int64_t len = input.dim(2);
  if (cin != in_channels_) {
    throw ShapeError("conv1d " + name_ + ": expected " + std::to_string(in_channels_) +
                     " input channels, got " + input.shape_str());
  }
  if (len % stride_ != 0 || len < kernel_) {
    throw ShapeError("conv1d " + name_ + ": input length " + std::to_string(len) +
                     " not divisible by stride " + std::to_string(stride_));
  }
  const std::int64_t out_len = len / stride_;

  phase_planes_.assign(static_cast<std::size_t>(n * cin * kernel_ * out_len), 0.0);
  const auto plane = [&](std::int64_t b, std::int64_t i, std::int64_t k) {
    return phase_planes_.data() + ((b * cin + i) * kernel_ + k) * out_len;
  };
  for (std::int64_t b = 0; b < n; ++b) {
    for (std::int64_t i = 0; i < cin; ++i) {
      const double* src = &input.at(b, i, 0);
      for (std::int64_t k = 0; k < kernel_; ++k) {
        double* dst = plane(b, i, k);
        for (std::int64_t j = 0; j < out_len; ++j) dst[j] = src[j * stride_ + k];
      }
    }
  }

  Tensor out({n, out_channels_, out_len});
  for (std::int64_t b = 0; b < n; ++b) {
    for (std::int64_t o = 0; o < out_channels_; ++o) {
      double* dst = &out.at(b, o, 0);
      const double bias = bias_[o];
      for (std::int64_t j = 0; j < out_len; ++j) dst[j] = bias;
      for (std::int64_t i = 0; i < in_channels_; ++i) {
        const double* w = &weight_.at(o, i, 0);
        for (std::int64_t k = 0; k < kernel_; ++k) {
          const double wk = w[k];
          const double* x = plane(b, i, k);
          for (std::int64_t j = 0; j < out_len; ++j) dst[j] += wk * x[j];
        }
      }
    }
  }

  cached_n_ = n;
  cached_len_ = len;
  has_cache_ = true;
  return out;
}

Tensor Conv1d::backward(const Tensor& grad_out) {
  require_cache(has_cache_, "conv1d");
  require_3d(grad_out, "conv1d backward");
  const std::int64_t n = cached_n_;
  const std::int64_t cin = in_channels_;
  const std::int64_t len = cached_len_;
  const std::int64_t out_len = len / stride_;
  if (grad_out.dim(0) != n || grad_out.dim(1) != out_channels_ || grad_out.dim(2) != out_len) {
    throw ShapeError("conv1d backward: grad shape " + grad_out.shape_str());
  }
  const auto plane = [&](std::int64_t b, std::int64_t i, std::int64_t k) {
    return phase_planes_.data() + ((b * cin + i) * kernel_ + k) * out_len;
  };

  Tensor grad_in({n, in_channels_, len});
  std::vector<double> gin_plane(static_cast<std::size_t>(kernel_ * out_len));
  for (std::int64_t b = 0; b < n; ++b) {
    for (std::int64_t o = 0; o < out_channels_; ++o) {
      const double* gout = &grad_out.at(b, o, 0);
      double gb = 0.0;
      for (std::int64_t j = 0; j < out_len; ++j) gb += gout[j];
      grad_bias_[o] += gb;
    }
    for (std::int64_t i = 0; i < in_channels_; ++i) {
      std::fill(gin_plane.begin(), gin_plane.end(), 0.0);
      for (std::int64_t o = 0; o < out_channels_; ++o) {
        const double* gout = &grad_out.at(b, o, 0);
        const double* w = &weight_.at(o, i, 0);
        double* gw = &grad_weight_.at(o, i, 0);
        for (std::int64_t k = 0; k < kernel_; ++k) {
          const double* x = plane(b, i, k);
          double* gi = gin_plane.data() + k * out_len;
          const double wk = w[k];
          double acc = 0.0;
          for (std::int64_t j = 0; j < out_len; ++j) {
            acc += gout[j] * x[j];
            gi[j] += gout[j] * wk;
          }
          gw[k] += acc;
        }
      }
      double* gin = &grad_in.at(b, i, 0);
      for (std::int64_t k = 0; k < kernel_; ++k) {
        const double* gi = gin_plane.data() + k * out_len;
        for (std::int64_t j = 0; j < out_len; ++j) gin[j * stride_ + k] = gi[j];
      }
    }
  }
  return grad_in;
}

std::vector<ParamRef> Conv1d::parameters() {
  return {{name_ + ".weight", &weight_, &grad_weight_},
          {name_ + ".bias", &bias_, &grad_bias_}};
}

// ---------------------------------------------------------------------------
// BatchNorm1d

BatchNorm1d::BatchNorm1d(std::int64_t channels, double eps, double momentum, std::string name)
    : name_(std::move(name)),
      channels_(channels),
      eps_(eps),
      momentum_(momentum),
      gamma_({channels}, 1.0),
      beta_({channels}),
      grad_gamma_({channels}),
      grad_beta_({channels}),
      running_mean_({channels}, 0.0),
      running_var_({channels}, 1.0) {}

Tensor BatchNorm1d::forward(const Tensor& input, Mode mode) {
  require_3d(input, "batchnorm1d");
  const std::int64_t n = input.dim(0);
  const std::int64_t c = input.dim(1);
  const std::int64_t len = input.dim(2);
  if (c != channels_) {
    throw ShapeError("batchnorm1d " + name_ + ": expected " + std::to_string(channels_) +
                     " channels, got " + input.shape_str());
  }

  Tensor out({n, c, len});
  cached_xhat_ = Tensor({n, c, len});
  cached_inv_std_.assign(static_cast<std::size_t>(c), 0.0);
  cached_mode_ = mode;

  if (mode == Mode::kTrain) {
    const std::int64_t m = n * len;
    if (m < 2) {
      throw DegenerateBatchError("batchnorm1d " + name_ + ": need at least 2 values per channel, got " +
                                 std::to_string(m));
    }
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::int64_t ch = 0; ch < c; ++ch) {
      double mean = 0.0;
      for (std::int64_t b = 0; b < n; ++b) {
        const double* x = &input.at(b, ch, 0);
        for (std::int64_t t = 0; t < len; ++t) mean += x[t];
      }
      mean *= inv_m;
      double var = 0.0;
      for (std::int64_t b = 0; b < n; ++b) {
        const double* x = &input.at(b, ch, 0);
        for (std::int64_t t = 0; t < len; ++t) {
          const double d = x[t] - mean;
          var += d * d;
        }
      }
      var *= inv_m;  // population variance

      running_mean_[ch] = (1.0 - momentum_) * running_mean_[ch] + momentum_ * mean;
      running_var_[ch] = (1.0 - momentum_) * running_var_[ch] + momentum_ * var;

      const double inv_std = 1.0 / std::sqrt(var + eps_);
      cached_inv_std_[static_cast<std::size_t>(ch)] = inv_std;
      const double g = gamma_[ch];
      const double bshift = beta_[ch];
      for (std::int64_t b = 0; b < n; ++b) {
        const double* x = &input.at(b, ch, 0);
        double* xh = &cached_xhat_.at(b, ch, 0);
        double* y = &out.at(b, ch, 0);
        for (std::int64_t t = 0; t < len; ++t) {
          xh[t] = (x[t] - mean) * inv_std;
          y[t] = g * xh[t] + bshift;
        }
      }
    }
  } else {
    for (std::int64_t ch = 0; ch < c; ++ch) {
      const double mean = running_mean_[ch];
      const double inv_std = 1.0 / std::sqrt(running_var_[ch] + eps_);
      cached_inv_std_[static_cast<std::size_t>(ch)] = inv_std;
      const double g = gamma_[ch];
      const double bshift = beta_[ch];
      for (std::int64_t b = 0; b < n; ++b) {
        const double* x = &input.at(b, ch, 0);
        double* xh = &cached_xhat_.at(b, ch, 0);
        double* y = &out.at(b, ch, 0);
        for (std::int64_t t = 0; t < len; ++t) {
          xh[t] = (x[t] - mean) * inv_std;
          y[t] = g * xh[t] + bshift;
        }
      }
    }
  }

  has_cache_ = true;
  return out;
}

Tensor BatchNorm1d::backward(const Tensor& grad_out) {
  require_cache(has_cache_, "batchnorm1d");
  require_same_shape(grad_out, cached_xhat_, "batchnorm1d backward");
  const std::int64_t n = grad_out.dim(0);
  const std::int64_t c = grad_out.dim(1);
  const std::int64_t len = grad_out.dim(2);

  Tensor grad_in({n, c, len});
  const double inv_m = 1.0 / static_cast<double>(n * len);

  for (std::int64_t ch = 0; ch < c; ++ch) {
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (std::int64_t b = 0; b < n; ++b) {
      const double* dy = &grad_out.at(b, ch, 0);
      const double* xh = &cached_xhat_.at(b, ch, 0);
      for (std::int64_t t = 0; t < len; ++t) {
        sum_dy += dy[t];
        sum_dy_xhat += dy[t] * xh[t];
      }
    }
    grad_beta_[ch] += sum_dy;
    grad_gamma_[ch] += sum_dy_xhat;

    const double g = gamma_[ch];
    const double inv_std = cached_inv_std_[static_cast<std::size_t>(ch)];

    if (cached_mode_ == Mode::kTrain) {
      // Batch statistics depend on the input, so the normalization terms
      // contribute to the gradient.
      const double mean_dy = sum_dy * inv_m;
      const double mean_dy_xhat = sum_dy_xhat * inv_m;
      for (std::int64_t b = 0; b < n; ++b) {
        const double* dy = &grad_out.at(b, ch, 0);
        const double* xh = &cached_xhat_.at(b, ch, 0);
        double* dx = &grad_in.at(b, ch, 0);
        for (std::int64_t t = 0; t < len; ++t) {
          dx[t] = g * inv_std * (dy[t] - mean_dy - xh[t] * mean_dy_xhat);
        }
      }
    } else {
      // Running statistics are constants in eval mode.
      for (std::int64_t b = 0; b < n; ++b) {
        const double* dy = &grad_out.at(b, ch, 0);
        double* dx = &grad_in.at(b, ch, 0);
        for (std::int64_t t = 0; t < len; ++t) dx[t] = g * inv_std * dy[t];
      }
    }
  }
  return grad_in;
}

std::vector<ParamRef> BatchNorm1d::parameters() {
  return {{name_ + ".gamma", &gamma_, &grad_gamma_},
          {name_ + ".beta", &beta_, &grad_beta_}};
}

std::vector<BufferRef> BatchNorm1d::buffers() {
  return {{name_ + ".running_mean", &running_mean_},
          {name_ + ".running_var", &running_var_}};
}

// ---------------------------------------------------------------------------
// Relu

Tensor Relu::forward(const Tensor& input, Mode) {
  Tensor out = input;
  active_.assign(static_cast<std::size_t>(out.numel()), 0);
  for (std::int64_t i = 0; i < out.numel(); ++i) {
    if (out[i] > 0.0) {
      active_[static_cast<std::size_t>(i)] = 1;
    } else {
      out[i] = 0.0;
    }
  }
  cached_shape_ = input.shape();
  has_cache_ = true;
  return out;
}

Tensor Relu::backward(const Tensor& grad_out) {
  require_cache(has_cache_, "relu");
  if (grad_out.shape() != cached_shape_) {
    throw ShapeError("relu backward: shape mismatch " + grad_out.shape_str());
  }
  Tensor grad_in = grad_out;
  for (std::int64_t i = 0; i < grad_in.numel(); ++i) {
    if (!active_[static_cast<std::size_t>(i)]) grad_in[i] = 0.0;
  }
  return grad_in;
}

// ---------------------------------------------------------------------------
// Reshape

Tensor Reshape::forward(const Tensor& input, Mode) {
  if (input.ndim() < 1) throw ShapeError("reshape: scalar input");
  std::vector<std::int64_t> shape{input.dim(0)};
  shape.insert(shape.end(), per_sample_shape_.begin(), per_sample_shape_.end());
  cached_input_shape_ = input.shape();
  has_cache_ = true;
  return input.reshaped(std::move(shape));
}

Tensor Reshape::backward(const Tensor& grad_out) {
  require_cache(has_cache_, "reshape");
  return grad_out.reshaped(cached_input_shape_);
}

// ---------------------------------------------------------------------------
// Linear

Linear::Linear(std::int64_t in_features, std::int64_t out_features, std::string name)
    : name_(std::move(name)),
      in_features_(in_features),
      out_features_(out_features),
      weight_({out_features, in_features}),
      bias_({out_features}),
      grad_weight_({out_features, in_features}),
      grad_bias_({out_features}) {}

Tensor Linear::forward(const Tensor& input, Mode) {
  if (input.ndim() != 2 || input.dim(1) != in_features_) {
    throw ShapeError("linear " + name_ + ": expected (n, " + std::to_string(in_features_) +
                     "), got " + input.shape_str());
  }
  const std::int64_t n = input.dim(0);
  Tensor out({n, out_features_});
  for (std::int64_t b = 0; b < n; ++b) {
    const double* x = &input.at(b, 0);
    for (std::int64_t o = 0; o < out_features_; ++o) {
      const double* w = &weight_.at(o, 0);
      double acc = bias_[o];
      for (std::int64_t i = 0; i < in_features_; ++i) acc += w[i] * x[i];
      out.at(b, o) = acc;
    }
  }
  cached_input_ = input;
  has_cache_ = true;
  return out;
}

Tensor Linear::backward(const Tensor& grad_out) {
  require_cache(has_cache_, "linear");
  const std::int64_t n = cached_input_.dim(0);
  if (grad_out.ndim() != 2 || grad_out.dim(0) != n || grad_out.dim(1) != out_features_) {
    throw ShapeError("linear backward: grad shape " + grad_out.shape_str());
  }
  Tensor grad_in({n, in_features_});
  for (std::int64_t b = 0; b < n; ++b) {
    const double* x = &cached_input_.at(b, 0);
    double* gin = &grad_in.at(b, 0);
    for (std::int64_t o = 0; o < out_features_; ++o) {
      const double g = grad_out.at(b, o);
      grad_bias_[o] += g;
      const double* w = &weight_.at(o, 0);
      double* gw = &grad_weight_.at(o, 0);
      for (std::int64_t i = 0; i < in_features_; ++i) {
        gw[i] += g * x[i];
        gin[i] += g * w[i];
      }
    }
  }
  return grad_in;
}

std::vector<ParamRef> Linear::parameters() {
  return {{name_ + ".weight", &weight_, &grad_weight_},
          {name_ + ".bias", &bias_, &grad_bias_}};
}

// ---------------------------------------------------------------------------
// MSE loss

MseResult mse_loss(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "mse_loss");
  if (pred.ndim() != 2) throw ShapeError("mse_loss: expected (n, d) tensors");
  const std::int64_t n = pred.dim(0);
  const std::int64_t d = pred.dim(1);
  if (n == 0) throw ShapeError("mse_loss: empty batch");

  MseResult res;
  res.per_dim.assign(static_cast<std::size_t>(d), 0.0);
  for (std::int64_t b = 0; b < n; ++b) {
    for (std::int64_t k = 0; k < d; ++k) {
      const double e = pred.at(b, k) - target.at(b, k);
      res.per_dim[static_cast<std::size_t>(k)] += e * e;
    }
  }
  for (std::int64_t k = 0; k < d; ++k) {
    res.per_dim[static_cast<std::size_t>(k)] /= static_cast<double>(n);
    res.scalar += res.per_dim[static_cast<std::size_t>(k)];
  }
  return res;
}

Tensor mse_loss_backward(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "mse_loss_backward");
  const std::int64_t n = pred.dim(0);
  Tensor grad = pred;
  const double scale = 2.0 / static_cast<double>(n);
  for (std::int64_t i = 0; i < grad.numel(); ++i) {
    grad[i] = scale * (pred[i] - target[i]);
  }
  return grad;
}

}  // namespace roomgeo
