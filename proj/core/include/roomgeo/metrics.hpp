#ifndef ROOMGEO_METRICS_HPP
#define ROOMGEO_METRICS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "roomgeo/dataset.hpp"
#include "roomgeo/model.hpp"

namespace roomgeo {

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t count = 0;
};

struct PerRoomStats {
  Vec3 dims{};      // sorted truth of the room
  Vec3 mean_err{};  // estimate - truth, positive means over-estimate
  Vec3 std_err{};   // population standard deviation per dimension
  std::size_t n_estimates = 0;
};

// Per-dimension error statistics of N-averaged estimates. Population
// variance throughout, so mse = bias^2 + variance holds exactly.
struct EvalReport {
  int group_size = 1;
  std::size_t n_groups = 0;
  std::array<double, 3> mse{};         // m^2
  std::array<double, 3> bias{};        // m, mean(estimate - truth)
  std::array<double, 3> variance{};    // m^2
  std::array<double, 3> median_abs{};  // m
  std::vector<HistogramBin> histogram;  // mixed-dimension squared errors
  std::vector<PerRoomStats> per_room;
};

// Estimates of one room, in record order.
struct RoomEstimates {
  Vec3 truth{};
  std::vector<std::array<double, 3>> estimates;
};

inline constexpr std::size_t kHistogramBins = 50;

// Statistical core of evaluate(): partitions each room's estimates into
// consecutive groups of group_size (remainder dropped), averages each group,
// and reports statistics of the group-estimates against the truth.
// Throws GroupingError when a room has fewer than group_size estimates.
EvalReport compute_report(const std::vector<RoomEstimates>& rooms, int group_size);

// Runs the model over every record (eval mode, batched), groups by room,
// and defers to compute_report. sort_outputs re-orders each network output
// ascending before scoring.
EvalReport evaluate(GeometryModel& model, const DatasetFile& test_set, int group_size,
                    bool sort_outputs = false, std::int64_t batch_size = 256);

// Per-record estimates grouped by room, for callers that need the raw values.
std::vector<RoomEstimates> collect_estimates(GeometryModel& model,
                                             const DatasetFile& test_set,
                                             bool sort_outputs = false,
                                             std::int64_t batch_size = 256);

struct PerRoomAnalysisConfig {
  int n_rooms = 8;
  int n_sources = 10;
  int n_receivers = 10;
  std::uint64_t seed = 0;
  std::array<DimRange, 3> dim_ranges{{{6.0, 10.0}, {5.0, 8.0}, {4.0, 6.0}}};
  double rt60_lo = 0.4;
  double rt60_hi = 1.0;
  ImageSourceConfig sim{};
};

// Freshly sampled rooms, a grid of sources x receivers each, per-room mean
// and standard deviation of the estimation error.
std::vector<PerRoomStats> per_room_analysis(GeometryModel& model,
                                            const PerRoomAnalysisConfig& cfg);

struct BenchResult {
  double mean_s = 0.0;
  double median_s = 0.0;
  double p99_s = 0.0;
  std::size_t iters = 0;
};

// Wall-clock of single-response estimates, excluding data preparation.
BenchResult runtime_bench(GeometryModel& model, std::size_t iters = 3000);

// CSV emission. Columns are documented in the README.
void write_mse_csv(const std::filesystem::path& path, const std::vector<EvalReport>& reports);
void write_hist_csv(const std::filesystem::path& path, const EvalReport& report);
void write_rooms_csv(const std::filesystem::path& path, const std::vector<PerRoomStats>& rooms);

}  // namespace roomgeo

#endif  // ROOMGEO_METRICS_HPP
