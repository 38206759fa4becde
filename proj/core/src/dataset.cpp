#include "roomgeo/dataset.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "binio.hpp"
#include "roomgeo/rng.hpp"
#include "roomgeo/version.hpp"

namespace roomgeo {

namespace {

constexpr char kDatasetMagic[4] = {'R', 'I', 'R', 'D'};

Vec3 sample_dims(const DatasetSpec& spec, Rng& rng) {
  Vec3 dims;
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const DimRange& r = spec.dim_ranges[axis];
    if (!(r.hi >= r.lo) || !(r.lo > 0.0)) {
      throw InvalidGeometryError("dimension range must be positive and ordered");
    }
    dims[axis] = rng.uniform(r.lo, r.hi);
  }
  return dims;
}

RoomSpec sample_room(const DatasetSpec& spec, const std::array<double, 6>& fixed_beta,
                     Rng& rng) {
  if (spec.mode == DatasetMode::kFixedBeta) {
    return RoomSpec::make(sample_dims(spec, rng), fixed_beta);
  }
  // Varying mode: re-draw rooms whose RT60 target is not realizable.
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Vec3 dims = sample_dims(spec, rng);
    const double rt60 = rng.uniform(spec.rt60_lo, spec.rt60_hi);
    try {
      return RoomSpec::make(dims, rt60_to_beta(dims, rt60, spec.sim.constants), rt60);
    } catch (const InfeasibleRt60Error&) {
      continue;
    }
  }
  throw InfeasibleRt60Error("no feasible RT60 draw in 100 attempts; check ranges");
}

std::vector<SourceReceiverPair> sample_pairs(const DatasetSpec& spec, const Vec3& dims,
                                             Rng& rng) {
  std::vector<SourceReceiverPair> pairs;
  pairs.reserve(spec.rirs_per_room);
  if (!spec.pair_grid) {
    for (std::uint32_t i = 0; i < spec.rirs_per_room; ++i) {
      pairs.push_back(sample_pair(dims, rng));
    }
    return pairs;
  }
  const auto grid = static_cast<std::uint32_t>(std::lround(std::sqrt(spec.rirs_per_room)));
  if (grid * grid != spec.rirs_per_room) {
    throw Error("pair_grid requires a square rirs_per_room, got " +
                std::to_string(spec.rirs_per_room));
  }
  std::vector<Vec3> sources(grid), receivers(grid);
  for (auto& s : sources) s = sample_interior_point(dims, rng);
  for (auto& r : receivers) r = sample_interior_point(dims, rng);
  for (const Vec3& s : sources) {
    for (const Vec3& r : receivers) {
      if (distance(s, r) < kMinPairSeparation) {
        // Nudge collisions by resampling the receiver against this source.
        Rng local(rng.next_u64());
        Vec3 rr = r;
        while (distance(s, rr) < kMinPairSeparation) rr = sample_interior_point(dims, local);
        pairs.push_back(SourceReceiverPair{s, rr});
      } else {
        pairs.push_back(SourceReceiverPair{s, r});
      }
    }
  }
  return pairs;
}

std::vector<RirRecord> generate_room(const DatasetSpec& spec,
                                     const std::array<double, 6>& fixed_beta,
                                     std::uint64_t room_index) {
  Rng rng(derive_seed(spec.seed, room_index));
  const RoomSpec room = sample_room(spec, fixed_beta, rng);
  const std::vector<SourceReceiverPair> pairs = sample_pairs(spec, room.dims, rng);

  std::vector<RirRecord> records;
  records.reserve(pairs.size());
  for (const SourceReceiverPair& pair : pairs) {
    const Rir rir = simulate_rir(room, pair, spec.sim);
    RirRecord rec;
    rec.dims = room.dims;
    rec.label = room.label;
    rec.beta = room.beta;
    rec.rt60_target =
        room.rt60_target ? *room.rt60_target : std::numeric_limits<double>::quiet_NaN();
    rec.source = pair.source;
    rec.receiver = pair.receiver;
    rec.samples.resize(rir.samples.size());
    for (std::size_t i = 0; i < rir.samples.size(); ++i) {
      rec.samples[i] = static_cast<float>(rir.samples[i]);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

nlohmann::json spec_to_json(const DatasetSpec& spec) {
  return nlohmann::json{
      {"n_rooms", spec.n_rooms},
      {"rirs_per_room", spec.rirs_per_room},
      {"mode", spec.mode == DatasetMode::kFixedBeta ? "fixed" : "varying"},
      {"dim_ranges",
       {{spec.dim_ranges[0].lo, spec.dim_ranges[0].hi},
        {spec.dim_ranges[1].lo, spec.dim_ranges[1].hi},
        {spec.dim_ranges[2].lo, spec.dim_ranges[2].hi}}},
      {"seed", spec.seed},
      {"pair_grid", spec.pair_grid},
      {"rt60_range", {spec.rt60_lo, spec.rt60_hi}},
      {"fixed_beta_range", {spec.fixed_beta_lo, spec.fixed_beta_hi}},
      {"fs", spec.sim.constants.fs},
      {"rir_len", spec.sim.n_samples},
  };
}

}  // namespace

DatasetFile generate(const DatasetSpec& spec, unsigned threads) {
  if (spec.n_rooms < 1 || spec.rirs_per_room < 1) {
    throw Error("dataset spec needs at least one room and one RIR per room");
  }

  // The shared coefficient set of fixed mode is drawn once per dataset,
  // each wall independently.
  std::array<double, 6> fixed_beta{};
  if (spec.mode == DatasetMode::kFixedBeta) {
    Rng beta_rng(derive_seed(spec.seed, 0xFBFBFBFBULL));
    for (double& b : fixed_beta) b = beta_rng.uniform(spec.fixed_beta_lo, spec.fixed_beta_hi);
  }

  std::vector<std::vector<RirRecord>> per_room(spec.n_rooms);
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::uint64_t room = next.fetch_add(1);
      if (room >= spec.n_rooms || failed.load()) return;
      try {
        per_room[room] = generate_room(spec, fixed_beta, room);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        failure = e.what();
        return;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw Error("dataset generation failed: " + failure);

  DatasetFile file;
  file.header.fs = static_cast<std::uint32_t>(spec.sim.constants.fs);
  file.header.rir_len = static_cast<std::uint32_t>(spec.sim.n_samples);
  file.header.mode = spec.mode;
  file.records.reserve(spec.n_rooms * spec.rirs_per_room);
  for (auto& room_records : per_room) {
    for (auto& rec : room_records) file.records.push_back(std::move(rec));
  }
  file.header.record_count = file.records.size();
  return file;
}

void write_dataset(const DatasetFile& file, const std::filesystem::path& path,
                   const DatasetSpec* spec_echo) {
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");

    binio::write_magic(os, kDatasetMagic);
    binio::write_le<std::uint16_t>(os, file.header.version);
    binio::write_le<std::uint32_t>(os, file.header.fs);
    binio::write_le<std::uint32_t>(os, file.header.rir_len);
    binio::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(file.records.size()));
    binio::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(file.header.mode));

    for (const RirRecord& rec : file.records) {
      if (rec.samples.size() != file.header.rir_len) {
        throw IoError("record sample count does not match header rir_len");
      }
      for (double v : rec.dims) binio::write_le<double>(os, v);
      for (double v : rec.label) binio::write_le<double>(os, v);
      for (double v : rec.beta) binio::write_le<double>(os, v);
      binio::write_le<double>(os, rec.rt60_target);
      for (double v : rec.source) binio::write_le<double>(os, v);
      for (double v : rec.receiver) binio::write_le<double>(os, v);
      for (float v : rec.samples) binio::write_le<float>(os, v);
    }
    if (!os) throw IoError("write failed: " + path.string());
  }

  nlohmann::json manifest{
      {"file", path.filename().string()},
      {"generator", std::string("roomgeo ") + kGitDescribe},
      {"record_count", file.records.size()},
      {"checksum_fnv1a64", fnv1a64_file(path)},
  };
  if (spec_echo) manifest["spec"] = spec_to_json(*spec_echo);

  std::ofstream ms(path.string() + ".manifest.json");
  if (!ms) throw IoError("cannot write manifest for " + path.string());
  ms << manifest.dump(2) << "\n";
}

DatasetFile read_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());

  binio::expect_magic(is, kDatasetMagic, "RIRD dataset");
  DatasetFile file;
  file.header.version = binio::read_le<std::uint16_t>(is);
  if (file.header.version != 1) {
    throw IoError("unsupported dataset version " + std::to_string(file.header.version));
  }
  file.header.fs = binio::read_le<std::uint32_t>(is);
  file.header.rir_len = binio::read_le<std::uint32_t>(is);
  file.header.record_count = binio::read_le<std::uint64_t>(is);
  file.header.mode = static_cast<DatasetMode>(binio::read_le<std::uint8_t>(is));

  file.records.resize(file.header.record_count);
  for (RirRecord& rec : file.records) {
    for (double& v : rec.dims) v = binio::read_le<double>(is);
    for (double& v : rec.label) v = binio::read_le<double>(is);
    for (double& v : rec.beta) v = binio::read_le<double>(is);
    rec.rt60_target = binio::read_le<double>(is);
    for (double& v : rec.source) v = binio::read_le<double>(is);
    for (double& v : rec.receiver) v = binio::read_le<double>(is);
    rec.samples.resize(file.header.rir_len);
    for (float& v : rec.samples) v = binio::read_le<float>(is);
  }
  return file;
}

DatasetFile generate_or_load(const DatasetSpec& spec, const std::filesystem::path& path,
                             unsigned threads) {
  if (std::filesystem::exists(path)) {
    std::ifstream ms(path.string() + ".manifest.json");
    if (ms) {
      try {
        const nlohmann::json manifest = nlohmann::json::parse(ms);
        if (manifest.at("spec") == spec_to_json(spec)) {
          return read_dataset(path);
        }
      } catch (const std::exception&) {
        // fall through and regenerate
      }
    }
  }
  const DatasetFile file = generate(spec, threads);
  write_dataset(file, path, &spec);
  return file;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  char buf[1 << 16];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    const std::streamsize got = is.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001B3ULL;
    }
  }
  return hash;
}

std::vector<std::size_t> shuffle_permutation(std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> perm(count);
  for (std::size_t i = 0; i < count; ++i) perm[i] = i;
  if (seed == 0) return perm;  // reserved: no shuffle
  Rng rng(seed);
  for (std::size_t i = count; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

BatchStream::BatchStream(const DatasetFile& file, std::vector<std::size_t> order,
                         std::int64_t batch_size, bool drop_partial)
    : file_(&file), order_(std::move(order)), batch_size_(batch_size) {
  if (batch_size_ < 1) throw Error("batch size must be >= 1");
  const std::size_t n = order_.size();
  n_batches_ = drop_partial ? n / static_cast<std::size_t>(batch_size_)
                            : (n + static_cast<std::size_t>(batch_size_) - 1) /
                                  static_cast<std::size_t>(batch_size_);
}

Batch BatchStream::batch(std::size_t i) const {
  if (i >= n_batches_) throw Error("batch index out of range");
  const std::size_t begin = i * static_cast<std::size_t>(batch_size_);
  const std::size_t end = std::min(begin + static_cast<std::size_t>(batch_size_), order_.size());
  const auto n = static_cast<std::int64_t>(end - begin);
  const auto len = static_cast<std::int64_t>(file_->header.rir_len);

  Batch out{Tensor({n, len}), Tensor({n, 3})};
  for (std::size_t r = begin; r < end; ++r) {
    const RirRecord& rec = file_->records[order_[r]];
    const auto row = static_cast<std::int64_t>(r - begin);
    double* dst = &out.input.at(row, 0);
    for (std::int64_t s = 0; s < len; ++s) dst[s] = rec.samples[static_cast<std::size_t>(s)];
    for (std::int64_t k = 0; k < 3; ++k) {
      out.target.at(row, k) = rec.label[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

}  // namespace roomgeo
