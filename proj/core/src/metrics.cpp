#include "roomgeo/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>

#include "roomgeo/rng.hpp"

namespace roomgeo {

namespace {

double median_of(std::vector<double>& values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<HistogramBin> build_histogram(const std::vector<double>& sq_errors) {
  std::vector<HistogramBin> bins(kHistogramBins);
  const double max_err =
      sq_errors.empty() ? 0.0 : *std::max_element(sq_errors.begin(), sq_errors.end());
  if (!(max_err > 0.0)) {
    bins.assign(1, HistogramBin{0.0, 0.0, sq_errors.size()});
    return bins;
  }
  const double width = max_err / static_cast<double>(kHistogramBins);
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    bins[b].lo = width * static_cast<double>(b);
    bins[b].hi = width * static_cast<double>(b + 1);
  }
  for (double e : sq_errors) {
    auto idx = static_cast<std::size_t>(e / width);
    if (idx >= kHistogramBins) idx = kHistogramBins - 1;  // e == max_err
    ++bins[idx].count;
  }
  return bins;
}

}  // namespace

EvalReport compute_report(const std::vector<RoomEstimates>& rooms, int group_size) {
  if (group_size < 1) throw GroupingError("group size must be >= 1");

  EvalReport report;
  report.group_size = group_size;

  std::array<std::vector<double>, 3> errors;  // per dimension, across all groups
  std::vector<double> mixed_sq_errors;

  for (const RoomEstimates& room : rooms) {
    if (room.estimates.size() < static_cast<std::size_t>(group_size)) {
      throw GroupingError("room has " + std::to_string(room.estimates.size()) +
                          " estimates, need >= " + std::to_string(group_size));
    }
    const std::size_t n_groups = room.estimates.size() / static_cast<std::size_t>(group_size);

    PerRoomStats room_stats;
    room_stats.dims = room.truth;
    std::array<double, 3> sum{}, sum_sq{};

    for (std::size_t g = 0; g < n_groups; ++g) {
      std::array<double, 3> mean{};
      for (std::size_t i = 0; i < static_cast<std::size_t>(group_size); ++i) {
        const auto& est = room.estimates[g * static_cast<std::size_t>(group_size) + i];
        for (std::size_t k = 0; k < 3; ++k) mean[k] += est[k];
      }
      for (std::size_t k = 0; k < 3; ++k) {
        mean[k] /= static_cast<double>(group_size);
        const double err = mean[k] - room.truth[k];
        errors[k].push_back(err);
        mixed_sq_errors.push_back(err * err);
        sum[k] += err;
        sum_sq[k] += err * err;
      }
    }

    room_stats.n_estimates = n_groups;
    for (std::size_t k = 0; k < 3; ++k) {
      const double m = sum[k] / static_cast<double>(n_groups);
      room_stats.mean_err[k] = m;
      room_stats.std_err[k] =
          std::sqrt(std::max(0.0, sum_sq[k] / static_cast<double>(n_groups) - m * m));
    }
    report.per_room.push_back(room_stats);
  }

  report.n_groups = errors[0].size();
  if (report.n_groups == 0) throw GroupingError("no estimates to evaluate");

  for (std::size_t k = 0; k < 3; ++k) {
    const double n = static_cast<double>(errors[k].size());
    double mean = 0.0;
    for (double e : errors[k]) mean += e;
    mean /= n;
    double mse = 0.0, var = 0.0;
    for (double e : errors[k]) {
      mse += e * e;
      var += (e - mean) * (e - mean);
    }
    report.mse[k] = mse / n;
    report.bias[k] = mean;
    report.variance[k] = var / n;  // population variance

    std::vector<double> abs_errors(errors[k].size());
    for (std::size_t i = 0; i < errors[k].size(); ++i) abs_errors[i] = std::abs(errors[k][i]);
    report.median_abs[k] = median_of(abs_errors);
  }

  report.histogram = build_histogram(mixed_sq_errors);
  return report;
}

std::vector<RoomEstimates> collect_estimates(GeometryModel& model,
                                             const DatasetFile& test_set,
                                             bool sort_outputs, std::int64_t batch_size) {
  model.set_mode(Mode::kEval);
  std::vector<std::size_t> order(test_set.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  BatchStream stream(test_set, std::move(order), batch_size, /*drop_partial=*/false);

  // Rooms keyed by exact label bits, in first-appearance order.
  std::map<Vec3, std::size_t> room_index;
  std::vector<RoomEstimates> rooms;

  std::size_t record = 0;
  for (std::size_t b = 0; b < stream.size(); ++b) {
    const Batch batch = stream.batch(b);
    const Tensor pred = model.estimate_batch(batch.input);
    for (std::int64_t r = 0; r < pred.dim(0); ++r, ++record) {
      const RirRecord& rec = test_set.records[record];
      std::array<double, 3> est{pred.at(r, 0), pred.at(r, 1), pred.at(r, 2)};
      if (sort_outputs) std::sort(est.begin(), est.end());
      auto [it, inserted] = room_index.try_emplace(rec.label, rooms.size());
      if (inserted) {
        rooms.push_back(RoomEstimates{rec.label, {}});
      }
      rooms[it->second].estimates.push_back(est);
    }
  }
  return rooms;
}

EvalReport evaluate(GeometryModel& model, const DatasetFile& test_set, int group_size,
                    bool sort_outputs, std::int64_t batch_size) {
  return compute_report(collect_estimates(model, test_set, sort_outputs, batch_size),
                        group_size);
}

std::vector<PerRoomStats> per_room_analysis(GeometryModel& model,
                                            const PerRoomAnalysisConfig& cfg) {
  std::vector<RoomEstimates> rooms;
  for (int room_idx = 0; room_idx < cfg.n_rooms; ++room_idx) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(room_idx)));
    Vec3 dims;
    for (std::size_t axis = 0; axis < 3; ++axis) {
      dims[axis] = rng.uniform(cfg.dim_ranges[axis].lo, cfg.dim_ranges[axis].hi);
    }
    const double rt60 = rng.uniform(cfg.rt60_lo, cfg.rt60_hi);
    const RoomSpec room = RoomSpec::make(dims, rt60_to_beta(dims, rt60, cfg.sim.constants), rt60);

    std::vector<Vec3> sources(static_cast<std::size_t>(cfg.n_sources));
    std::vector<Vec3> receivers(static_cast<std::size_t>(cfg.n_receivers));
    for (auto& s : sources) s = sample_interior_point(dims, rng);
    for (auto& r : receivers) r = sample_interior_point(dims, rng);

    RoomEstimates est;
    est.truth = room.label;
    for (const Vec3& s : sources) {
      for (const Vec3& r : receivers) {
        if (distance(s, r) < kMinPairSeparation) continue;
        const Rir rir = simulate_rir(room, SourceReceiverPair{s, r}, cfg.sim);
        est.estimates.push_back(model.estimate(rir.samples));
      }
    }
    rooms.push_back(std::move(est));
  }

  std::vector<PerRoomStats> stats;
  for (const RoomEstimates& room : rooms) {
    PerRoomStats s;
    s.dims = room.truth;
    s.n_estimates = room.estimates.size();
    std::array<double, 3> sum{}, sum_sq{};
    for (const auto& est : room.estimates) {
      for (std::size_t k = 0; k < 3; ++k) {
        const double err = est[k] - room.truth[k];
        sum[k] += err;
        sum_sq[k] += err * err;
      }
    }
    const double n = static_cast<double>(room.estimates.size());
    for (std::size_t k = 0; k < 3; ++k) {
      s.mean_err[k] = sum[k] / n;
      s.std_err[k] = std::sqrt(std::max(0.0, sum_sq[k] / n - s.mean_err[k] * s.mean_err[k]));
    }
    stats.push_back(s);
  }
  return stats;
}

BenchResult runtime_bench(GeometryModel& model, std::size_t iters) {
  model.set_mode(Mode::kEval);
  // Synthetic input shaped like a real response; content does not matter
  // for timing.
  std::vector<double> rir(kRirLength, 0.0);
  Rng rng(1);
  for (std::size_t i = 30; i < rir.size(); ++i) {
    const double t = static_cast<double>(i) / 8000.0;
    rir[i] = rng.normal() * std::exp(-6.0 * t) / (1.0 + static_cast<double>(i));
  }

  std::vector<double> timings;
  timings.reserve(iters);
  volatile double sink = 0.0;
  for (std::size_t i = 0; i < iters; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const std::array<double, 3> est = model.estimate(rir);
    const auto stop = std::chrono::steady_clock::now();
    sink = sink + est[0];
    timings.push_back(std::chrono::duration<double>(stop - start).count());
  }
  (void)sink;

  BenchResult res;
  res.iters = iters;
  double sum = 0.0;
  for (double t : timings) sum += t;
  res.mean_s = sum / static_cast<double>(timings.size());
  std::sort(timings.begin(), timings.end());
  res.median_s = timings[timings.size() / 2];
  res.p99_s = timings[static_cast<std::size_t>(0.99 * static_cast<double>(timings.size()))];
  return res;
}

void write_mse_csv(const std::filesystem::path& path,
                   const std::vector<EvalReport>& reports) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "group_size,dimension,mse_m2,bias_m,variance_m2,median_abs_m\n";
  os.precision(10);
  const char* dims[3] = {"length", "width", "height"};
  for (const EvalReport& r : reports) {
    for (std::size_t k = 0; k < 3; ++k) {
      os << r.group_size << "," << dims[k] << "," << r.mse[k] << "," << r.bias[k] << ","
         << r.variance[k] << "," << r.median_abs[k] << "\n";
    }
  }
}

void write_hist_csv(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "bin_low,bin_high,count\n";
  os.precision(10);
  for (const HistogramBin& b : report.histogram) {
    os << b.lo << "," << b.hi << "," << b.count << "\n";
  }
}

void write_rooms_csv(const std::filesystem::path& path,
                     const std::vector<PerRoomStats>& rooms) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "dim_x,dim_y,dim_z,mean_err_x,mean_err_y,mean_err_z,std_x,std_y,std_z\n";
  os.precision(10);
  for (const PerRoomStats& r : rooms) {
    os << r.dims[0] << "," << r.dims[1] << "," << r.dims[2] << "," << r.mean_err[0] << ","
       << r.mean_err[1] << "," << r.mean_err[2] << "," << r.std_err[0] << "," << r.std_err[1]
       << "," << r.std_err[2] << "\n";
  }
}

}  // namespace roomgeo
