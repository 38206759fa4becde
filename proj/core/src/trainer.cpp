#include "roomgeo/trainer.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "roomgeo/rng.hpp"

namespace roomgeo {

double validation_mse(GeometryModel& model, const DatasetFile& data,
                      std::int64_t batch_size) {
  const Mode saved = model.mode();
  model.set_mode(Mode::kEval);

  std::vector<std::size_t> order(data.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  BatchStream stream(data, std::move(order), batch_size, /*drop_partial=*/false);

  double sq_err[3] = {0.0, 0.0, 0.0};
  std::size_t count = 0;
  for (std::size_t b = 0; b < stream.size(); ++b) {
    const Batch batch = stream.batch(b);
    const Tensor pred = model.forward(batch.input);
    const std::int64_t n = pred.dim(0);
    for (std::int64_t r = 0; r < n; ++r) {
      for (std::int64_t k = 0; k < 3; ++k) {
        const double e = pred.at(r, k) - batch.target.at(r, k);
        sq_err[k] += e * e;
      }
    }
    count += static_cast<std::size_t>(n);
  }
  model.set_mode(saved);
  if (count == 0) throw Error("validation set is empty");
  return (sq_err[0] + sq_err[1] + sq_err[2]) / static_cast<double>(count);
}

TrainResult train(GeometryModel& model, const DatasetFile& train_set,
                  const DatasetFile& val_set, const TrainConfig& cfg) {
  if (train_set.records.empty() || val_set.records.empty()) {
    throw Error("train/validation sets must be non-empty");
  }
  if (cfg.patience < 1) throw Error("patience must be >= 1");

  TrainResult result;
  if (cfg.max_epochs <= 0) return result;

  Adam optimizer(model.parameters(), cfg.adam);
  std::vector<Tensor> best_snapshot;
  double best_val = std::numeric_limits<double>::infinity();
  std::int64_t epochs_since_best = 0;

  for (std::int64_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::uint64_t epoch_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch));
    if (epoch_seed == 0) epoch_seed = 1;
    BatchStream stream(train_set,
                       shuffle_permutation(train_set.records.size(), epoch_seed),
                       cfg.batch_size, /*drop_partial=*/true);

    model.set_mode(Mode::kTrain);
    double train_loss = 0.0;
    for (std::size_t b = 0; b < stream.size(); ++b) {
      const Batch batch = stream.batch(b);
      const Tensor pred = model.forward(batch.input);
      const MseResult loss = mse_loss(pred, batch.target);
      if (!std::isfinite(loss.scalar)) {
        throw TrainingDivergedError("training loss became non-finite at epoch " +
                                    std::to_string(epoch));
      }
      train_loss += loss.scalar;
      model.zero_grad();
      model.backward(mse_loss_backward(pred, batch.target));
      optimizer.step();
    }
    if (stream.size() > 0) train_loss /= static_cast<double>(stream.size());

    const double val_loss = validation_mse(model, val_set, cfg.batch_size);
    if (!std::isfinite(val_loss)) {
      throw TrainingDivergedError("validation loss became non-finite at epoch " +
                                  std::to_string(epoch));
    }

    result.history.push_back(EpochStats{epoch, train_loss, val_loss});
    result.epochs_run = epoch;
    if (cfg.verbose) {
      std::cerr << "epoch " << epoch << "  train " << train_loss << "  val " << val_loss
                << "\n";
    }

    if (val_loss < best_val) {
      best_val = val_loss;
      best_snapshot = model.snapshot();
      result.best_epoch = epoch;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= cfg.patience) {
        result.early_stopped = true;
        break;
      }
    }
  }

  if (!best_snapshot.empty()) model.restore(best_snapshot);
  result.best_val_mse = best_val;
  model.set_mode(Mode::kEval);
  return result;
}

void write_loss_history(const std::filesystem::path& path,
                        const std::vector<EpochStats>& history) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "epoch,train_mse,val_mse\n";
  os.precision(12);
  for (const EpochStats& e : history) {
    os << e.epoch << "," << e.train_mse << "," << e.val_mse << "\n";
  }
}

}  // namespace roomgeo
