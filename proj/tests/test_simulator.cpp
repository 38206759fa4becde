#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "roomgeo/simulator.hpp"

using namespace roomgeo;

namespace {

RoomSpec uniform_room(const Vec3& dims, double beta) {
  std::array<double, 6> b;
  b.fill(beta);
  return RoomSpec::make(dims, b);
}

double energy(const std::vector<double>& samples) {
  double e = 0.0;
  for (double s : samples) e += s * s;
  return e;
}

}  // namespace

TEST_CASE("sabine round trip on the worked example") {
  // dims [6,5,4]: V = 120, S = 148. a = 0.3 gives
  // RT60 = 0.1611 * 120 / (148 * 0.3) = 0.435405... s
  const double rt60 = sabine_rt60({6, 5, 4}, 0.3);
  CHECK(rt60 == doctest::Approx(0.4354).epsilon(1e-3));

  const auto beta = rt60_to_beta({6, 5, 4}, rt60);
  const double expected_beta = std::sqrt(1.0 - 0.3);  // 0.83666
  for (double b : beta) CHECK(b == doctest::Approx(expected_beta).epsilon(1e-9));
}

TEST_CASE("rt60_to_beta limits") {
  // Lossless-wall limit: huge RT60 drives absorption to 0 and beta to 1.
  const auto beta = rt60_to_beta({6, 5, 4}, 1e9);
  for (double b : beta) {
    CHECK(b > 0.999999);
    CHECK(b < 1.0);
  }
  // a = 0.1611*120/(148*0.1) = 1.306 >= 1: infeasible.
  CHECK_THROWS_AS(rt60_to_beta({6, 5, 4}, 0.1), InfeasibleRt60Error);
  CHECK_THROWS_AS(rt60_to_beta({6, 5, 4}, 0.0), InfeasibleRt60Error);
}

TEST_CASE("anechoic room produces the single free-field impulse") {
  const RoomSpec room = uniform_room({4, 4, 4}, 0.0);
  const SourceReceiverPair pair{{1, 1, 1}, {1, 1, 2}};
  // d = 1 m -> 8000/340 = 23.529 samples, amplitude 1/(4 pi).
  const double amp = 1.0 / (4.0 * std::numbers::pi);

  SUBCASE("nearest sample: one impulse at tap 24") {
    ImageSourceConfig cfg;
    cfg.fractional_delay = FractionalDelay::kNearestSample;
    const Rir rir = simulate_rir(room, pair, cfg);
    REQUIRE(rir.samples.size() == 4096);
    CHECK(rir.samples[24] == doctest::Approx(amp).epsilon(1e-12));
    for (std::size_t i = 0; i < rir.samples.size(); ++i) {
      if (i != 24) CHECK(rir.samples[i] == 0.0);
    }
  }

  SUBCASE("windowed sinc: energy split across taps 23/24") {
    const Rir rir = simulate_rir(room, pair, ImageSourceConfig{});
    // Largest taps straddle the fractional delay.
    CHECK(rir.samples[23] > 0.4 * amp);
    CHECK(rir.samples[24] > 0.4 * amp);
    // Interpolation preserves the pulse integral.
    double sum = 0.0;
    for (double s : rir.samples) sum += s;
    CHECK(sum == doctest::Approx(amp).epsilon(1e-2));
    // Nothing before the direct onset, nothing past the filter tail.
    for (std::size_t i = 0; i < 23; ++i) CHECK(rir.samples[i] == 0.0);
    for (std::size_t i = 70; i < rir.samples.size(); ++i) CHECK(rir.samples[i] == 0.0);
  }
}

TEST_CASE("image bookkeeping: one order-0 and six order-1 images") {
  const RoomSpec room = uniform_room({6, 5, 4}, 0.8);
  const SourceReceiverPair pair{{2.0, 1.5, 1.2}, {4.0, 3.5, 2.8}};
  const auto images = list_images(room, pair);

  int order0 = 0, order1 = 0;
  for (const ImageSource& img : images) {
    if (img.order == 0) ++order0;
    if (img.order == 1) ++order1;
  }
  CHECK(order0 == 1);
  CHECK(order1 == 6);
}

TEST_CASE("simulate_rir matches the brute-force oracle") {
  Rng rng(31);
  int checked = 0;
  for (int trial = 0; trial < 22; ++trial) {
    const Vec3 dims{rng.uniform(3.0, 10.0), rng.uniform(3.0, 8.0), rng.uniform(2.5, 6.0)};
    std::array<double, 6> beta;
    for (double& b : beta) b = rng.uniform(0.3, 0.95);
    const RoomSpec room = RoomSpec::make(dims, beta);
    const SourceReceiverPair pair = sample_pair(dims, rng);

    ImageSourceConfig cfg;
    cfg.n_samples = (trial < 18) ? 512 : 1024;
    if (trial == 21) cfg.n_samples = 4096;
    cfg.fractional_delay =
        (trial % 3 == 0) ? FractionalDelay::kNearestSample : FractionalDelay::kWindowedSinc;

    const Rir rir = simulate_rir(room, pair, cfg);
    const std::vector<double> ref = oracles::brute_force_rir(room, pair, cfg);
    REQUIRE(rir.samples.size() == ref.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      worst = std::max(worst, std::abs(rir.samples[i] - ref[i]));
    }
    CHECK(worst <= 1e-9);
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("reciprocity: swapping source and receiver is sample-exact") {
  Rng rng(37);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec3 dims{rng.uniform(4.0, 9.0), rng.uniform(4.0, 7.0), rng.uniform(3.0, 5.0)};
    const RoomSpec room = uniform_room(dims, rng.uniform(0.5, 0.9));
    const SourceReceiverPair pair = sample_pair(dims, rng);
    ImageSourceConfig cfg;
    cfg.n_samples = 1024;

    const Rir fwd = simulate_rir(room, pair, cfg);
    const Rir rev = simulate_rir(room, SourceReceiverPair{pair.receiver, pair.source}, cfg);
    REQUIRE(fwd.samples.size() == rev.samples.size());
    for (std::size_t i = 0; i < fwd.samples.size(); ++i) {
      CHECK(fwd.samples[i] == rev.samples[i]);
    }
  }
}

TEST_CASE("energy never decreases when reflection coefficients grow") {
  Rng rng(41);
  for (int trial = 0; trial < 6; ++trial) {
    const Vec3 dims{rng.uniform(4.0, 9.0), rng.uniform(4.0, 7.0), rng.uniform(3.0, 5.0)};
    const double beta_lo = rng.uniform(0.4, 0.8);
    const SourceReceiverPair pair = sample_pair(dims, rng);
    ImageSourceConfig cfg;
    cfg.n_samples = 1024;
    cfg.fractional_delay =
        (trial % 2 == 0) ? FractionalDelay::kNearestSample : FractionalDelay::kWindowedSinc;

    const Rir low = simulate_rir(uniform_room(dims, beta_lo), pair, cfg);
    const Rir high = simulate_rir(uniform_room(dims, beta_lo + 0.1), pair, cfg);
    CHECK(energy(high.samples) >= energy(low.samples));
  }
}

TEST_CASE("consistent axis permutation leaves the response unchanged") {
  Rng rng(43);
  const Vec3 dims{7.0, 5.0, 4.0};
  std::array<double, 6> beta{0.9, 0.8, 0.85, 0.7, 0.75, 0.6};
  const SourceReceiverPair pair = sample_pair(dims, rng);

  ImageSourceConfig cfg;
  cfg.n_samples = 1024;
  const Rir base = simulate_rir(RoomSpec::make(dims, beta), pair, cfg);

  // Swap x and y everywhere.
  const Vec3 dims_p{dims[1], dims[0], dims[2]};
  const std::array<double, 6> beta_p{beta[2], beta[3], beta[0], beta[1], beta[4], beta[5]};
  const SourceReceiverPair pair_p{{pair.source[1], pair.source[0], pair.source[2]},
                                  {pair.receiver[1], pair.receiver[0], pair.receiver[2]}};
  const Rir permuted = simulate_rir(RoomSpec::make(dims_p, beta_p), pair_p, cfg);

  // Identical image set; summation order differs, so allow rounding noise.
  for (std::size_t i = 0; i < base.samples.size(); ++i) {
    CHECK(std::abs(base.samples[i] - permuted.samples[i]) <= 1e-12);
  }
}

TEST_CASE("first arrival lands on the direct-path delay") {
  Rng rng(47);
  for (int trial = 0; trial < 8; ++trial) {
    const Vec3 dims{rng.uniform(6.0, 10.0), rng.uniform(5.0, 8.0), rng.uniform(4.0, 6.0)};
    const double rt60 = rng.uniform(0.4, 1.0);
    const RoomSpec room = RoomSpec::make(dims, rt60_to_beta(dims, rt60), rt60);
    const SourceReceiverPair pair = sample_pair(dims, rng);
    const Rir rir = simulate_rir(room, pair);

    const double expected =
        std::round(distance(pair.source, pair.receiver) / 340.0 * 8000.0);
    std::size_t first = rir.samples.size();
    for (std::size_t i = 0; i < rir.samples.size(); ++i) {
      if (std::abs(rir.samples[i]) > 1e-12) {
        first = i;
        break;
      }
    }
    REQUIRE(first < rir.samples.size());
    CHECK(std::abs(static_cast<double>(first) - expected) <= 1.0);
  }
}

TEST_CASE("simulation is deterministic and rejects bad geometry") {
  const Vec3 dims{6, 5, 4};
  const RoomSpec room = uniform_room(dims, 0.8);
  const SourceReceiverPair pair{{2, 2, 2}, {4, 3, 1.5}};
  ImageSourceConfig cfg;
  cfg.n_samples = 512;

  const Rir a = simulate_rir(room, pair, cfg);
  const Rir b = simulate_rir(room, pair, cfg);
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);

  CHECK_THROWS_AS(simulate_rir(room, SourceReceiverPair{{7, 2, 2}, {3, 3, 3}}, cfg),
                  InvalidGeometryError);
  CHECK_THROWS_AS(simulate_rir(room, SourceReceiverPair{{2, 2, 2}, {2, 2, 2}}, cfg),
                  InvalidGeometryError);
}
