// Smoke tests of the installed command line, driven through std::system.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "roomgeo/dataset.hpp"

#ifndef ROOMGEO_CLI_PATH
#error "ROOMGEO_CLI_PATH must point at the roomgeo binary"
#endif

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string cmd = std::string(ROOMGEO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string run_capture(const std::string& args, int* exit_code = nullptr) {
  const fs::path tmp = fs::temp_directory_path() / "roomgeo_cli_out.txt";
  const std::string cmd =
      std::string(ROOMGEO_CLI_PATH) + " " + args + " > " + tmp.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (exit_code) *exit_code = WEXITSTATUS(status);
  std::ifstream is(tmp);
  std::stringstream ss;
  ss << is.rdbuf();
  fs::remove(tmp);
  return ss.str();
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / "roomgeo_cli_ws";
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string p(const char* name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("help and usage errors follow the exit-code contract") {
  CHECK(run("--help") == 0);
  CHECK(run("gen --help") == 0);
  CHECK(run("train --help") == 0);
  CHECK(run("eval --help") == 0);
  CHECK(run("estimate --help") == 0);
  CHECK(run("bench --help") == 0);
  CHECK(run("--definitely-not-a-flag") == 1);
  CHECK(run("gen --rooms 1") == 1);       // missing required --out
  CHECK(run("notasubcommand") == 1);
  CHECK(run("train --train nope.rird --val nope.rird --out x.rgwt") == 2);
}

TEST_CASE("gen / train / estimate / eval round trip") {
  Workspace ws;
  CHECK(run("gen --rooms 2 --rirs-per-room 4 --seed 3 --out " + ws.p("d.rird")) == 0);
  CHECK(fs::exists(ws.p("d.rird")));
  CHECK(fs::exists(ws.p("d.rird") + ".manifest.json"));

  // Same flags, byte-identical output.
  CHECK(run("gen --rooms 2 --rirs-per-room 4 --seed 3 --out " + ws.p("d2.rird")) == 0);
  CHECK(roomgeo::fnv1a64_file(ws.p("d.rird")) == roomgeo::fnv1a64_file(ws.p("d2.rird")));

  CHECK(run("train --train " + ws.p("d.rird") + " --val " + ws.p("d.rird") +
            " --epochs 1 --batch 4 --seed 1 --out " + ws.p("m.rgwt")) == 0);
  CHECK(fs::exists(ws.p("m.rgwt")));
  CHECK(fs::exists(ws.p("m.rgwt") + ".loss_history.csv"));

  int code = 0;
  const std::string est =
      run_capture("estimate --model " + ws.p("m.rgwt") + " --rir " + ws.p("d.rird"), &code);
  CHECK(code == 0);
  double a = 0, b = 0, c = 0;
  CHECK(std::sscanf(est.c_str(), "%lf %lf %lf", &a, &b, &c) == 3);

  // Raw f32 input path: reuse the first record's samples.
  {
    const roomgeo::DatasetFile data = roomgeo::read_dataset(ws.p("d.rird"));
    std::ofstream os(ws.p("raw.f32"), std::ios::binary);
    os.write(reinterpret_cast<const char*>(data.records[0].samples.data()),
             static_cast<std::streamsize>(data.records[0].samples.size() * sizeof(float)));
  }
  const std::string est_raw =
      run_capture("estimate --model " + ws.p("m.rgwt") + " --rir " + ws.p("raw.f32"), &code);
  CHECK(code == 0);
  CHECK(est_raw == est);  // same record, same estimate

  CHECK(run("eval --model " + ws.p("m.rgwt") + " --data " + ws.p("d.rird") +
            " --group-size 1 --group-size 4 --report " + ws.p("rep")) == 0);
  CHECK(fs::exists(ws.p("rep") + "/report_mse.csv"));
  CHECK(fs::exists(ws.p("rep") + "/report_hist.csv"));
  CHECK(fs::exists(ws.p("rep") + "/report_rooms.csv"));

  // Group size beyond the per-room count names the valid range.
  const std::string err = run_capture("eval --model " + ws.p("m.rgwt") + " --data " +
                                          ws.p("d.rird") + " --group-size 8",
                                      &code);
  CHECK(code == 2);
  CHECK(err.find("valid sizes") != std::string::npos);

  CHECK(run("bench --model " + ws.p("m.rgwt") + " --iters 20") == 0);
}
