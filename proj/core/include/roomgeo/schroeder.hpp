#ifndef ROOMGEO_SCHROEDER_HPP
#define ROOMGEO_SCHROEDER_HPP

#include <span>
#include <vector>

#include "roomgeo/acoustics.hpp"

namespace roomgeo {

// Backward-integrated energy decay curve in dB, normalized to 0 dB at the
// first sample. Entries after the integrated energy reaches zero are
// truncated away.
std::vector<double> schroeder_decay_db(std::span<const double> samples);

// 100 Hz high-pass applied before decay readings of simulated responses.
// The raw image-source sum carries a coherent low-frequency buildup (every
// image adds with positive amplitude) that decays slower than the
// reverberant field and stretches broadband RT60 readings by 20-30%.
std::vector<double> measurement_highpass(std::span<const double> samples, double fs);

// Reverberation time by the T20 method: least-squares line through the
// -5 dB .. -25 dB span of the Schroeder curve, extrapolated to -60 dB.
// Throws InsufficientDecayError when the curve never reaches -25 dB inside
// the window (e.g. an anechoic impulse).
double measure_rt60(std::span<const double> samples, double fs);

double measure_rt60(const Rir& rir);

}  // namespace roomgeo

#endif  // ROOMGEO_SCHROEDER_HPP
