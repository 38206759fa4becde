#include "roomgeo/model.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "binio.hpp"
#include "roomgeo/rng.hpp"

namespace roomgeo {

namespace {

constexpr char kWeightMagic[4] = {'R', 'G', 'W', 'T'};
constexpr std::uint16_t kWeightVersion = 1;

void kaiming_uniform(Tensor& t, std::int64_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(-bound, bound);
}

}  // namespace

GeometryModel::GeometryModel(std::uint64_t seed) {
  const std::int64_t channels[] = {1, 10, 20, 40, 80, 160, 160};

  layers_.push_back(std::make_unique<Reshape>(std::vector<std::int64_t>{1, kInputLength},
                                              "reshape_in"));
  for (int i = 0; i < 6; ++i) {
    const std::string idx = std::to_string(i + 1);
    layers_.push_back(
        std::make_unique<Conv1d>(channels[i], channels[i + 1], 4, 4, "conv" + idx));
    layers_.push_back(std::make_unique<BatchNorm1d>(channels[i + 1], 1e-5, 0.1, "bn" + idx));
    layers_.push_back(std::make_unique<Relu>("relu" + idx));
  }
  layers_.push_back(
      std::make_unique<Reshape>(std::vector<std::int64_t>{160}, "reshape_flat"));
  layers_.push_back(std::make_unique<Linear>(160, 40, "fc1"));
  layers_.push_back(std::make_unique<Linear>(40, kOutputDims, "fc2"));

  Rng rng(seed);
  for (auto& layer : layers_) {
    if (auto* conv = dynamic_cast<Conv1d*>(layer.get())) {
      const std::int64_t fan_in = conv->in_channels() * conv->kernel();
      kaiming_uniform(conv->weight(), fan_in, rng);
      kaiming_uniform(conv->bias(), fan_in, rng);
    } else if (auto* fc = dynamic_cast<Linear*>(layer.get())) {
      kaiming_uniform(fc->weight(), fc->in_features(), rng);
      kaiming_uniform(fc->bias(), fc->in_features(), rng);
    }
  }
}

Tensor GeometryModel::forward(const Tensor& input) {
  if (input.ndim() != 2 || input.dim(1) != kInputLength) {
    throw ShapeError("model input must be (n, 4096), got " + input.shape_str());
  }
  Tensor x = input;
  for (auto& layer : layers_) x = layer->forward(x, mode_);
  return x;
}

Tensor GeometryModel::backward(const Tensor& grad_output) {
  Tensor g = grad_output;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

std::vector<ParamRef> GeometryModel::parameters() {
  std::vector<ParamRef> out;
  for (auto& layer : layers_) {
    for (ParamRef& p : layer->parameters()) out.push_back(p);
  }
  return out;
}

std::vector<BufferRef> GeometryModel::buffers() {
  std::vector<BufferRef> out;
  for (auto& layer : layers_) {
    for (BufferRef& b : layer->buffers()) out.push_back(b);
  }
  return out;
}

void GeometryModel::zero_grad() {
  for (ParamRef& p : parameters()) p.grad->fill(0.0);
}

std::int64_t GeometryModel::count_parameters() {
  std::int64_t n = 0;
  for (const ParamRef& p : parameters()) n += p.value->numel();
  return n;
}

std::vector<Layer*> GeometryModel::layers() {
  std::vector<Layer*> out;
  out.reserve(layers_.size());
  for (auto& l : layers_) out.push_back(l.get());
  return out;
}

std::array<double, 3> GeometryModel::estimate(std::span<const double> rir) {
  if (rir.size() != static_cast<std::size_t>(kInputLength)) {
    throw ShapeError("estimate: expected 4096 samples, got " + std::to_string(rir.size()));
  }
  Tensor input({1, kInputLength});
  std::copy(rir.begin(), rir.end(), input.data());
  const Tensor out = estimate_batch(input);
  return {out.at(0, 0), out.at(0, 1), out.at(0, 2)};
}

Tensor GeometryModel::estimate_batch(const Tensor& input) {
  if (mode_ != Mode::kEval) {
    throw StateError("estimate requires eval mode");
  }
  return forward(input);
}

std::array<double, 3> GeometryModel::estimate_averaged(
    const std::vector<std::vector<double>>& rirs) {
  if (rirs.empty()) throw Error("estimate_averaged: empty input");
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  for (const auto& rir : rirs) {
    const std::array<double, 3> e = estimate(rir);
    for (int k = 0; k < 3; ++k) mean[static_cast<std::size_t>(k)] += e[static_cast<std::size_t>(k)];
  }
  for (double& v : mean) v /= static_cast<double>(rirs.size());
  return mean;
}

std::vector<Tensor> GeometryModel::snapshot() {
  std::vector<Tensor> snap;
  for (const ParamRef& p : parameters()) snap.push_back(*p.value);
  for (const BufferRef& b : buffers()) snap.push_back(*b.tensor);
  return snap;
}

void GeometryModel::restore(const std::vector<Tensor>& snap) {
  std::size_t i = 0;
  for (ParamRef& p : parameters()) *p.value = snap.at(i++);
  for (BufferRef& b : buffers()) *b.tensor = snap.at(i++);
}

void GeometryModel::save(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");

  std::vector<std::pair<std::string, const Tensor*>> entries;
  for (const ParamRef& p : parameters()) entries.emplace_back(p.name, p.value);
  for (const BufferRef& b : buffers()) entries.emplace_back(b.name, b.tensor);

  binio::write_magic(os, kWeightMagic);
  binio::write_le<std::uint16_t>(os, kWeightVersion);
  binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(entries.size()));
  for (const auto& [name, tensor] : entries) {
    binio::write_string(os, name);
    binio::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(tensor->ndim()));
    for (std::int64_t d : tensor->shape()) {
      binio::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(d));
    }
    for (std::int64_t i = 0; i < tensor->numel(); ++i) {
      binio::write_le<double>(os, (*tensor)[i]);
    }
  }
  if (!os) throw IoError("write failed: " + path.string());
}

GeometryModel GeometryModel::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());

  binio::expect_magic(is, kWeightMagic, "RGWT weight");
  const auto version = binio::read_le<std::uint16_t>(is);
  if (version != kWeightVersion) {
    throw IoError("unsupported weight file version " + std::to_string(version));
  }
  const auto count = binio::read_le<std::uint32_t>(is);

  GeometryModel model(0);
  std::map<std::string, Tensor*> slots;
  for (ParamRef& p : model.parameters()) slots[p.name] = p.value;
  for (BufferRef& b : model.buffers()) slots[b.name] = b.tensor;

  std::size_t filled = 0;
  for (std::uint32_t e = 0; e < count; ++e) {
    const std::string name = binio::read_string(is);
    const auto ndim = binio::read_le<std::uint8_t>(is);
    std::vector<std::int64_t> shape(ndim);
    for (auto& d : shape) d = static_cast<std::int64_t>(binio::read_le<std::uint64_t>(is));

    auto it = slots.find(name);
    if (it == slots.end()) throw IoError("unknown tensor in weight file: " + name);
    if (it->second->shape() != shape) {
      throw IoError("shape mismatch for " + name);
    }
    for (std::int64_t i = 0; i < it->second->numel(); ++i) {
      (*it->second)[i] = binio::read_le<double>(is);
    }
    ++filled;
  }
  if (filled != slots.size()) {
    throw IoError("weight file incomplete: " + std::to_string(filled) + "/" +
                  std::to_string(slots.size()) + " tensors");
  }
  model.set_mode(Mode::kEval);
  return model;
}

}  // namespace roomgeo
