#ifndef ROOMGEO_DATASET_HPP
#define ROOMGEO_DATASET_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "roomgeo/acoustics.hpp"
#include "roomgeo/simulator.hpp"
#include "roomgeo/tensor.hpp"

namespace roomgeo {

enum class DatasetMode : std::uint8_t {
  kFixedBeta = 0,    // one shared reflection-coefficient set for the corpus
  kVaryingRt60 = 1,  // per-room RT60 drawn uniformly, Sabine inverted per room
};

struct DimRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct DatasetSpec {
  std::uint64_t n_rooms = 0;
  std::uint32_t rirs_per_room = 16;
  DatasetMode mode = DatasetMode::kVaryingRt60;
  // Length x width x height sampled independently per axis.
  std::array<DimRange, 3> dim_ranges{{{6.0, 10.0}, {5.0, 8.0}, {4.0, 6.0}}};
  std::uint64_t seed = 0;

  // 16 fully independent pairs by default; true draws sqrt(rirs_per_room)
  // sources and receivers and takes their cartesian product.
  bool pair_grid = false;

  double rt60_lo = 0.4;  // varying mode target range, seconds
  double rt60_hi = 1.0;
  double fixed_beta_lo = 0.7;  // fixed mode per-wall draw range
  double fixed_beta_hi = 0.95;

  ImageSourceConfig sim{};
};

// One serialized record: room metadata in f64, samples in f32.
struct RirRecord {
  Vec3 dims{};
  Vec3 label{};
  std::array<double, 6> beta{};
  double rt60_target = 0.0;  // NaN in fixed mode
  Vec3 source{};
  Vec3 receiver{};
  std::vector<float> samples;
};

struct DatasetHeader {
  std::uint16_t version = 1;
  std::uint32_t fs = 8000;
  std::uint32_t rir_len = static_cast<std::uint32_t>(kRirLength);
  std::uint64_t record_count = 0;
  DatasetMode mode = DatasetMode::kVaryingRt60;
};

struct DatasetFile {
  DatasetHeader header;
  std::vector<RirRecord> records;
};

// Simulates the full corpus described by `spec`. Rooms are processed in
// parallel with per-room derived seeds, so the result is byte-identical
// regardless of thread count. Room i occupies records
// [i * rirs_per_room, (i+1) * rirs_per_room).
DatasetFile generate(const DatasetSpec& spec, unsigned threads = 1);

// "RIRD" container, little-endian throughout. write_dataset also emits a
// <path>.manifest.json sidecar with the generation spec, the generator
// version, and an FNV-1a checksum of the file bytes.
void write_dataset(const DatasetFile& file, const std::filesystem::path& path,
                   const DatasetSpec* spec_echo = nullptr);
DatasetFile read_dataset(const std::filesystem::path& path);

// Reads `path` when it exists and its manifest echoes `spec`; otherwise
// generates the corpus and writes it there.
DatasetFile generate_or_load(const DatasetSpec& spec, const std::filesystem::path& path,
                             unsigned threads = 1);

std::uint64_t fnv1a64_file(const std::filesystem::path& path);

// Permutation of [0, count). Seed 0 is reserved for "no shuffle" and
// returns the identity order.
std::vector<std::size_t> shuffle_permutation(std::size_t count, std::uint64_t seed);

struct Batch {
  Tensor input;   // (n, rir_len), raw sample values
  Tensor target;  // (n, 3), ascending-sorted labels
};

// Batches over `file` in permutation order. Training drops the final
// partial batch; evaluation keeps it.
class BatchStream {
 public:
  BatchStream(const DatasetFile& file, std::vector<std::size_t> order,
              std::int64_t batch_size, bool drop_partial);

  std::size_t size() const { return n_batches_; }
  bool empty() const { return n_batches_ == 0; }
  Batch batch(std::size_t i) const;

 private:
  const DatasetFile* file_;
  std::vector<std::size_t> order_;
  std::int64_t batch_size_;
  std::size_t n_batches_;
};

}  // namespace roomgeo

#endif  // ROOMGEO_DATASET_HPP
