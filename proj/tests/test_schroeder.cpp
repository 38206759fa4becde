#include <doctest.h>

#include <cmath>
#include <vector>

#include "roomgeo/rng.hpp"
#include "roomgeo/schroeder.hpp"
#include "roomgeo/simulator.hpp"

using namespace roomgeo;

TEST_CASE("pure impulse has no measurable decay") {
  std::vector<double> samples(4096, 0.0);
  samples[100] = 1.0;
  CHECK_THROWS_AS(measure_rt60(samples, 8000.0), InsufficientDecayError);
}

TEST_CASE("silent signal is rejected") {
  std::vector<double> samples(4096, 0.0);
  CHECK_THROWS_AS(measure_rt60(samples, 8000.0), InsufficientDecayError);
}

TEST_CASE("synthetic exponential decay measures its construction time") {
  // Energy envelope exp(-6 ln10 t / T) reaches -60 dB at exactly t = T,
  // so the amplitude envelope is exp(-3 ln10 t / T).
  const double fs = 8000.0;
  for (double T : {0.3, 0.5, 0.8}) {
    std::vector<double> samples(4096);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double t = static_cast<double>(i) / fs;
      samples[i] = std::exp(-3.0 * std::log(10.0) * t / T);
    }
    const double measured = measure_rt60(samples, fs);
    CHECK(measured == doctest::Approx(T).epsilon(0.05));
  }
}

TEST_CASE("decay curve starts at 0 dB and is monotone for an exponential") {
  const double fs = 8000.0;
  std::vector<double> samples(2048);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = std::exp(-3.0 * std::log(10.0) * static_cast<double>(i) / (fs * 0.4));
  }
  const std::vector<double> decay = schroeder_decay_db(samples);
  REQUIRE(!decay.empty());
  CHECK(decay[0] == doctest::Approx(0.0));
  for (std::size_t i = 1; i < decay.size(); ++i) CHECK(decay[i] <= decay[i - 1] + 1e-12);
}

TEST_CASE("simulated room lands near its RT60 target") {
  const Vec3 dims{6, 5, 4};
  const double target = 0.6;
  const RoomSpec room = RoomSpec::make(dims, rt60_to_beta(dims, target), target);
  const Rir rir = simulate_rir(room, SourceReceiverPair{{1.5, 1.2, 1.1}, {4.2, 3.6, 2.7}});
  const double measured = measure_rt60(rir);
  CHECK(measured == doctest::Approx(target).epsilon(0.20));

  // Reading the band-limited response avoids the coherent low-frequency
  // buildup of the image sum and tracks the target more tightly.
  const double hp = measure_rt60(measurement_highpass(rir.samples, rir.fs), rir.fs);
  CHECK(hp == doctest::Approx(target).epsilon(0.15));
}

TEST_CASE("rt60 control holds across random rooms above 100 Hz") {
  Rng rng(53);
  int within = 0;
  const int total = 12;
  for (int i = 0; i < total; ++i) {
    const Vec3 dims{rng.uniform(6, 10), rng.uniform(5, 8), rng.uniform(4, 6)};
    const double target = rng.uniform(0.4, 1.0);
    const RoomSpec room = RoomSpec::make(dims, rt60_to_beta(dims, target), target);
    const Rir rir = simulate_rir(room, sample_pair(dims, rng));
    const double measured = measure_rt60(measurement_highpass(rir.samples, rir.fs), rir.fs);
    if (std::abs(measured / target - 1.0) <= 0.20) ++within;
  }
  CHECK(within >= (total * 9) / 10);
}

TEST_CASE("highpass keeps the decay rate of a broadband tail") {
  // Noise-modulated exponential: broadband like a real reverberant tail, so
  // the 100 Hz high-pass only strips the mean and leaves the envelope.
  const double fs = 8000.0;
  const double T = 0.5;
  Rng rng(59);
  std::vector<double> samples(4096);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double t = static_cast<double>(i) / fs;
    samples[i] = rng.normal() * std::exp(-3.0 * std::log(10.0) * t / T);
  }
  CHECK(measure_rt60(samples, fs) == doctest::Approx(T).epsilon(0.05));

  const std::vector<double> hp = measurement_highpass(samples, fs);
  double mean = 0.0;
  for (double v : hp) mean += v;
  mean /= static_cast<double>(hp.size());
  CHECK(std::abs(mean) < 1e-3);
  CHECK(measure_rt60(hp, fs) == doctest::Approx(T).epsilon(0.05));
}
