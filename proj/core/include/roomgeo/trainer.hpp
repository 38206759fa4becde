#ifndef ROOMGEO_TRAINER_HPP
#define ROOMGEO_TRAINER_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "roomgeo/dataset.hpp"
#include "roomgeo/model.hpp"
#include "roomgeo/optim.hpp"

namespace roomgeo {

struct TrainConfig {
  std::int64_t max_epochs = 2000;
  std::int64_t batch_size = 50;
  std::int64_t patience = 30;  // early-stopping window S
  AdamConfig adam{};
  std::uint64_t seed = 0;
  bool verbose = false;  // one line per epoch on stderr
};

struct EpochStats {
  std::int64_t epoch = 0;  // 1-based
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  std::int64_t epochs_run = 0;
  std::int64_t best_epoch = 0;  // 0 when no epoch ran
  double best_val_mse = 0.0;
  bool early_stopped = false;
};

// Full training loop: per epoch one shuffled pass over the training set in
// train mode (final partial batch dropped), then the validation MSE in eval
// mode (partial batch kept). Stops once the validation loss has not improved
// on the best seen for `patience` consecutive epochs and restores the
// best-validation snapshot. Throws TrainingDivergedError on NaN loss.
TrainResult train(GeometryModel& model, const DatasetFile& train_set,
                  const DatasetFile& val_set, const TrainConfig& cfg);

// Scalar validation MSE (sum of per-dimension means) in eval mode.
double validation_mse(GeometryModel& model, const DatasetFile& data,
                      std::int64_t batch_size);

void write_loss_history(const std::filesystem::path& path,
                        const std::vector<EpochStats>& history);

}  // namespace roomgeo

#endif  // ROOMGEO_TRAINER_HPP
