#ifndef ROOMGEO_SIMULATOR_HPP
#define ROOMGEO_SIMULATOR_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "roomgeo/acoustics.hpp"

namespace roomgeo {

enum class FractionalDelay {
  kNearestSample,  // whole-sample delay quantization
  kWindowedSinc,   // 81-tap Hann-windowed sinc interpolation
};

inline constexpr int kSincTaps = 81;
inline constexpr int kSincHalf = kSincTaps / 2;

struct ImageSourceConfig {
  PhysicalConstants constants{};
  FractionalDelay fractional_delay = FractionalDelay::kWindowedSinc;
  std::size_t n_samples = kRirLength;
  // Per-axis image lattice index bound. -1 derives the bound from the
  // analysis window so every image within n_samples is covered:
  // ceil(c * Twindow / (2 * min(dims))) + 1.
  int max_order = -1;
};

int auto_lattice_bound(const Vec3& dims, const ImageSourceConfig& cfg);

// Sabine's relation between reverberation time and average absorption.
double sabine_rt60(const Vec3& dims, double avg_absorption,
                   const PhysicalConstants& constants = {});

// Reflection coefficients realizing a target RT60: the average absorption is
// a = 0.1611 * V / (S * rt60), shared by all six walls as beta = sqrt(1 - a).
// Throws InfeasibleRt60Error when a >= 1.
std::array<double, 6> rt60_to_beta(const Vec3& dims, double rt60,
                                   const PhysicalConstants& constants = {});

struct ImageSource {
  double dist_m = 0.0;     // path length in meters
  double amplitude = 0.0;  // reflection product / (4 pi d)
  int order = 0;           // total wall bounces
};

// All image sources whose onset falls inside the analysis window.
std::vector<ImageSource> list_images(const RoomSpec& room, const SourceReceiverPair& pair,
                                     const ImageSourceConfig& cfg = {});

// Image-source synthesis of the room impulse response. Each image
// contributes amplitude (prod beta^bounces) / (4 pi d) at delay d/c,
// placed either on the nearest sample or through the windowed sinc.
// Samples before the direct-path onset are zeroed: band-limited
// interpolation would otherwise leak acausal pre-ring there.
// The source/receiver pair is canonicalized internally, so swapping the
// two yields a bit-identical response.
Rir simulate_rir(const RoomSpec& room, const SourceReceiverPair& pair,
                 const ImageSourceConfig& cfg = {});

}  // namespace roomgeo

#endif  // ROOMGEO_SIMULATOR_HPP
