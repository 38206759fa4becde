// roomgeo command line: dataset generation, training, evaluation,
// single-shot estimation and benchmarking of the room-geometry regressor.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "roomgeo/dataset.hpp"
#include "roomgeo/metrics.hpp"
#include "roomgeo/model.hpp"
#include "roomgeo/schroeder.hpp"
#include "roomgeo/trainer.hpp"
#include "roomgeo/version.hpp"

namespace fs = std::filesystem;
using namespace roomgeo;

namespace {

struct GenOptions {
  std::uint64_t rooms = 0;
  std::uint32_t rirs_per_room = 16;
  std::string mode = "varying";
  std::uint64_t seed = 0;
  std::string out;
  bool pair_grid = false;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

DatasetSpec to_spec(const GenOptions& opt) {
  DatasetSpec spec;
  spec.n_rooms = opt.rooms;
  spec.rirs_per_room = opt.rirs_per_room;
  spec.mode = opt.mode == "fixed" ? DatasetMode::kFixedBeta : DatasetMode::kVaryingRt60;
  spec.seed = opt.seed;
  spec.pair_grid = opt.pair_grid;
  return spec;
}

void run_gen(const GenOptions& opt) {
  const DatasetSpec spec = to_spec(opt);
  std::cout << "generating " << spec.n_rooms << " rooms x " << spec.rirs_per_room
            << " RIRs (" << opt.mode << " mode, seed " << spec.seed << ", " << opt.threads
            << " threads)\n";
  const DatasetFile file = generate(spec, opt.threads);
  write_dataset(file, opt.out, &spec);
  std::cout << "wrote " << file.records.size() << " records to " << opt.out << "\n";
}

struct TrainOptions {
  std::string train_path, val_path, out;
  std::string history;
  std::int64_t epochs = 2000;
  std::int64_t batch = 50;
  std::int64_t patience = 30;
  double lr = 0.001;
  std::uint64_t seed = 0;
  bool verbose = false;
};

void run_train(const TrainOptions& opt) {
  const DatasetFile train_set = read_dataset(opt.train_path);
  const DatasetFile val_set = read_dataset(opt.val_path);

  GeometryModel model(opt.seed);
  TrainConfig cfg;
  cfg.max_epochs = opt.epochs;
  cfg.batch_size = opt.batch;
  cfg.patience = opt.patience;
  cfg.adam.lr = opt.lr;
  cfg.seed = opt.seed;
  cfg.verbose = opt.verbose;

  const TrainResult result = train(model, train_set, val_set, cfg);
  model.save(opt.out);

  const std::string history_path =
      opt.history.empty() ? opt.out + ".loss_history.csv" : opt.history;
  write_loss_history(history_path, result.history);

  std::cout << "stopped after " << result.epochs_run << " epochs"
            << (result.early_stopped ? " (early stop)" : "") << "\n"
            << "best validation MSE " << result.best_val_mse << " at epoch "
            << result.best_epoch << "\n"
            << "weights: " << opt.out << "\nhistory: " << history_path << "\n";
}

struct EvalOptions {
  std::string model_path, data_path, report_dir = ".";
  std::vector<int> group_sizes{1};
  bool sort_outputs = false;
};

void run_eval(const EvalOptions& opt) {
  GeometryModel model = GeometryModel::load(opt.model_path);
  const DatasetFile data = read_dataset(opt.data_path);

  const std::vector<RoomEstimates> rooms =
      collect_estimates(model, data, opt.sort_outputs);
  std::size_t min_count = rooms.empty() ? 0 : rooms.front().estimates.size();
  for (const RoomEstimates& r : rooms) min_count = std::min(min_count, r.estimates.size());
  for (int g : opt.group_sizes) {
    if (g < 1 || static_cast<std::size_t>(g) > min_count) {
      throw GroupingError("group size " + std::to_string(g) +
                          " unavailable; valid sizes are 1.." + std::to_string(min_count));
    }
  }

  fs::create_directories(opt.report_dir);
  std::vector<EvalReport> reports;
  for (int g : opt.group_sizes) reports.push_back(compute_report(rooms, g));

  write_mse_csv(fs::path(opt.report_dir) / "report_mse.csv", reports);
  write_hist_csv(fs::path(opt.report_dir) / "report_hist.csv", reports.front());
  write_rooms_csv(fs::path(opt.report_dir) / "report_rooms.csv", reports.front().per_room);

  for (const EvalReport& r : reports) {
    std::printf("N=%-3d mse [%.4g, %.4g, %.4g]  bias [%.4g, %.4g, %.4g]  var [%.4g, %.4g, %.4g]  median [%.4g, %.4g, %.4g]\n",
                r.group_size, r.mse[0], r.mse[1], r.mse[2], r.bias[0], r.bias[1], r.bias[2],
                r.variance[0], r.variance[1], r.variance[2], r.median_abs[0], r.median_abs[1],
                r.median_abs[2]);
  }
  std::cout << "reports under " << opt.report_dir << "\n";
}

struct RoomsOptions {
  std::string model_path, report_dir = ".";
  int n_rooms = 8;
  int sources = 10;
  int receivers = 10;
  std::uint64_t seed = 0;
};

void run_rooms(const RoomsOptions& opt) {
  GeometryModel model = GeometryModel::load(opt.model_path);
  PerRoomAnalysisConfig cfg;
  cfg.n_rooms = opt.n_rooms;
  cfg.n_sources = opt.sources;
  cfg.n_receivers = opt.receivers;
  cfg.seed = opt.seed;

  const auto stats = per_room_analysis(model, cfg);
  fs::create_directories(opt.report_dir);
  write_rooms_csv(fs::path(opt.report_dir) / "report_rooms.csv", stats);
  for (const PerRoomStats& s : stats) {
    std::printf("room [%.2f %.2f %.2f]  mean err [%+.3f, %+.3f, %+.3f]  std [%.3f, %.3f, %.3f]\n",
                s.dims[0], s.dims[1], s.dims[2], s.mean_err[0], s.mean_err[1], s.mean_err[2],
                s.std_err[0], s.std_err[1], s.std_err[2]);
  }
  std::cout << "per-room report under " << opt.report_dir << "\n";
}

std::vector<double> load_rir_arg(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open " + path);
  char magic[4] = {0, 0, 0, 0};
  probe.read(magic, 4);
  probe.close();

  if (std::string(magic, 4) == "RIRD") {
    const DatasetFile data = read_dataset(path);
    if (data.records.empty()) throw IoError("dataset has no records");
    std::vector<double> rir(data.records[0].samples.size());
    for (std::size_t i = 0; i < rir.size(); ++i) {
      rir[i] = static_cast<double>(data.records[0].samples[i]);
    }
    return rir;
  }

  // Raw little-endian f32 samples.
  const auto bytes = fs::file_size(path);
  if (bytes != kRirLength * sizeof(float)) {
    throw IoError("raw RIR file must hold exactly 4096 f32 samples, got " +
                  std::to_string(bytes) + " bytes");
  }
  std::ifstream is(path, std::ios::binary);
  std::vector<float> raw(kRirLength);
  is.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(bytes));
  if (!is) throw IoError("short read on " + path);
  return {raw.begin(), raw.end()};
}

void run_estimate(const std::string& model_path, const std::string& rir_path) {
  GeometryModel model = GeometryModel::load(model_path);
  const std::vector<double> rir = load_rir_arg(rir_path);
  const std::array<double, 3> est = model.estimate(rir);
  std::printf("%.6f %.6f %.6f\n", est[0], est[1], est[2]);
}

void run_bench(const std::string& model_path, std::size_t iters) {
  GeometryModel model = GeometryModel::load(model_path);
  const BenchResult res = runtime_bench(model, iters);
  std::printf("iterations: %zu\nmean:   %.6e s\nmedian: %.6e s\np99:    %.6e s\n", res.iters,
              res.mean_s, res.median_s, res.p99_s);
}

struct ReproOptions {
  std::string out_dir = "repro_desk";
  std::uint64_t seed = 7;
  std::int64_t epochs = 300;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

// Desk-scale end-to-end reproduction: generate, train, evaluate, report.
void run_repro_desk(const ReproOptions& opt) {
  fs::create_directories(opt.out_dir);
  const fs::path dir(opt.out_dir);

  DatasetSpec train_spec;
  train_spec.n_rooms = 2000;
  train_spec.rirs_per_room = 4;
  train_spec.seed = opt.seed;
  DatasetSpec val_spec = train_spec;
  val_spec.n_rooms = 400;
  val_spec.seed = opt.seed + 1;
  DatasetSpec test_spec = val_spec;
  test_spec.seed = opt.seed + 2;

  const DatasetFile train_set = generate_or_load(train_spec, dir / "train.rird", opt.threads);
  const DatasetFile val_set = generate_or_load(val_spec, dir / "val.rird", opt.threads);
  const DatasetFile test_set = generate_or_load(test_spec, dir / "test.rird", opt.threads);

  GeometryModel model(opt.seed);
  TrainConfig cfg;
  cfg.max_epochs = opt.epochs;
  cfg.batch_size = 50;
  cfg.patience = 30;
  cfg.seed = opt.seed;
  cfg.verbose = true;
  const TrainResult result = train(model, train_set, val_set, cfg);
  model.save(dir / "model.rgwt");
  write_loss_history(dir / "loss_history.csv", result.history);
  std::cout << "training stopped after " << result.epochs_run << " epochs, best val "
            << result.best_val_mse << " at epoch " << result.best_epoch << "\n";

  const std::vector<RoomEstimates> rooms = collect_estimates(model, test_set);
  const EvalReport n1 = compute_report(rooms, 1);
  const EvalReport n4 = compute_report(rooms, 4);
  write_mse_csv(dir / "report_mse.csv", {n1, n4});
  write_hist_csv(dir / "report_hist.csv", n1);
  write_rooms_csv(dir / "report_rooms.csv", n1.per_room);

  // Reference point: the best constant predictor (training-set mean label).
  std::array<double, 3> mean_label{};
  for (const RirRecord& rec : train_set.records) {
    for (std::size_t k = 0; k < 3; ++k) mean_label[k] += rec.label[k];
  }
  for (double& v : mean_label) v /= static_cast<double>(train_set.records.size());
  std::array<double, 3> const_mse{};
  for (const RirRecord& rec : test_set.records) {
    for (std::size_t k = 0; k < 3; ++k) {
      const double e = mean_label[k] - rec.label[k];
      const_mse[k] += e * e;
    }
  }
  for (double& v : const_mse) v /= static_cast<double>(test_set.records.size());

  std::printf("test  N=1 mse [%.4f, %.4f, %.4f]   constant-predictor mse [%.4f, %.4f, %.4f]\n",
              n1.mse[0], n1.mse[1], n1.mse[2], const_mse[0], const_mse[1], const_mse[2]);
  std::printf("test  N=4 mse [%.4f, %.4f, %.4f]\n", n4.mse[0], n4.mse[1], n4.mse[2]);
  bool model_beats_half = true;
  bool averaging_helps = true;
  for (std::size_t k = 0; k < 3; ++k) {
    model_beats_half = model_beats_half && n1.mse[k] <= 0.5 * const_mse[k];
    averaging_helps = averaging_helps && n4.variance[k] <= 1.05 * n1.variance[k];
  }
  std::printf("model mse <= half of constant predictor per dimension: %s\n",
              model_beats_half ? "yes" : "NO");
  std::printf("N=4 averaging reduces per-dimension variance (slack 1.05): %s\n",
              averaging_helps ? "yes" : "NO");
  std::cout << "artifacts under " << opt.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"room geometry estimation from room impulse responses"};
  app.set_version_flag("--version", std::string("roomgeo ") + kGitDescribe);
  app.set_config("--config", "", "read options from a TOML-style config file");
  app.require_subcommand(1);

  GenOptions gen_opt;
  CLI::App* gen = app.add_subcommand("gen", "simulate a RIR dataset");
  gen->add_option("--rooms", gen_opt.rooms, "number of rooms")->required();
  gen->add_option("--rirs-per-room", gen_opt.rirs_per_room, "responses per room")
      ->default_val(16);
  gen->add_option("--mode", gen_opt.mode, "reflection coefficients: fixed|varying")
      ->check(CLI::IsMember({"fixed", "varying"}))
      ->default_val("varying");
  gen->add_option("--seed", gen_opt.seed, "generation seed")->default_val(0);
  gen->add_option("--out", gen_opt.out, "output .rird path")->required();
  gen->add_flag("--pair-grid", gen_opt.pair_grid,
                "sqrt(n) sources x sqrt(n) receivers instead of independent pairs");
  gen->add_option("--threads", gen_opt.threads, "worker threads");
  gen->callback([&]() { run_gen(gen_opt); });

  TrainOptions train_opt;
  CLI::App* train_cmd = app.add_subcommand("train", "train the geometry model");
  train_cmd->add_option("--train", train_opt.train_path, "training .rird")->required();
  train_cmd->add_option("--val", train_opt.val_path, "validation .rird")->required();
  train_cmd->add_option("--epochs", train_opt.epochs, "epoch cap")->default_val(2000);
  train_cmd->add_option("--batch", train_opt.batch, "batch size")->default_val(50);
  train_cmd->add_option("--patience", train_opt.patience, "early-stopping window")
      ->default_val(30);
  train_cmd->add_option("--lr", train_opt.lr, "Adam learning rate")->default_val(0.001);
  train_cmd->add_option("--seed", train_opt.seed, "init/shuffle seed")->default_val(0);
  train_cmd->add_option("--out", train_opt.out, "output .rgwt weights")->required();
  train_cmd->add_option("--history", train_opt.history, "loss history CSV path");
  train_cmd->add_flag("--verbose", train_opt.verbose, "log one line per epoch");
  train_cmd->callback([&]() { run_train(train_opt); });

  EvalOptions eval_opt;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a model on a test dataset");
  eval_cmd->add_option("--model", eval_opt.model_path, "weights .rgwt")->required();
  eval_cmd->add_option("--data", eval_opt.data_path, "test .rird")->required();
  eval_cmd->add_option("--group-size", eval_opt.group_sizes,
                       "averaging group sizes (repeatable)");
  eval_cmd->add_option("--report", eval_opt.report_dir, "report directory")->default_val(".");
  eval_cmd->add_flag("--sort-outputs", eval_opt.sort_outputs,
                     "sort each network output ascending before scoring");
  eval_cmd->callback([&]() { run_eval(eval_opt); });

  RoomsOptions rooms_opt;
  CLI::App* rooms_cmd =
      app.add_subcommand("rooms", "per-room error analysis on freshly sampled rooms");
  rooms_cmd->add_option("--model", rooms_opt.model_path, "weights .rgwt")->required();
  rooms_cmd->add_option("--rooms", rooms_opt.n_rooms, "number of rooms")->default_val(8);
  rooms_cmd->add_option("--sources", rooms_opt.sources, "sources per room")->default_val(10);
  rooms_cmd->add_option("--receivers", rooms_opt.receivers, "receivers per room")
      ->default_val(10);
  rooms_cmd->add_option("--seed", rooms_opt.seed, "sampling seed")->default_val(0);
  rooms_cmd->add_option("--report", rooms_opt.report_dir, "report directory")
      ->default_val(".");
  rooms_cmd->callback([&]() { run_rooms(rooms_opt); });

  std::string est_model, est_rir;
  CLI::App* est_cmd = app.add_subcommand("estimate", "estimate geometry from one response");
  est_cmd->add_option("--model", est_model, "weights .rgwt")->required();
  est_cmd->add_option("--rir", est_rir, "single-record .rird or raw 4096xf32 file")
      ->required();
  est_cmd->callback([&]() { run_estimate(est_model, est_rir); });

  std::string bench_model;
  std::size_t bench_iters = 3000;
  CLI::App* bench_cmd = app.add_subcommand("bench", "single-response inference latency");
  bench_cmd->add_option("--model", bench_model, "weights .rgwt")->required();
  bench_cmd->add_option("--iters", bench_iters, "number of timed estimates")
      ->default_val(3000);
  bench_cmd->callback([&]() { run_bench(bench_model, bench_iters); });

  ReproOptions repro_opt;
  CLI::App* repro_cmd = app.add_subcommand(
      "repro-desk", "desk-scale generate/train/evaluate chain with fixed seeds");
  repro_cmd->add_option("--out", repro_opt.out_dir, "working directory")
      ->default_val("repro_desk");
  repro_cmd->add_option("--seed", repro_opt.seed, "base seed")->default_val(7);
  repro_cmd->add_option("--epochs", repro_opt.epochs, "epoch cap")->default_val(300);
  repro_cmd->add_option("--threads", repro_opt.threads, "generation threads");
  repro_cmd->callback([&]() { run_repro_desk(repro_opt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;  // runtime failure
  }
  return 0;
}
