#include "roomgeo/schroeder.hpp"

#include <cmath>
#include <numbers>

#include "roomgeo/errors.hpp"

namespace roomgeo {

std::vector<double> measurement_highpass(std::span<const double> samples, double fs) {
  const double w = 2.0 * std::numbers::pi * 100.0 / fs;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w);
  const double b2 = -r1 * r1;
  const double a1 = -(1.0 + r1);

  std::vector<double> out(samples.size());
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    y2 = y1;
    y1 = y0;
    y0 = b1 * y1 + b2 * y2 + samples[i];
    out[i] = y0 + a1 * y1 + r1 * y2;
  }
  return out;
}

std::vector<double> schroeder_decay_db(std::span<const double> samples) {
  std::vector<double> energy(samples.size());
  double acc = 0.0;
  for (std::size_t i = samples.size(); i-- > 0;) {
    acc += samples[i] * samples[i];
    energy[i] = acc;
  }
  if (!(acc > 0.0)) {
    throw InsufficientDecayError("signal is silent");
  }
  std::vector<double> decay;
  decay.reserve(samples.size());
  const double total = energy[0];
  for (double e : energy) {
    if (!(e > 0.0)) break;
    decay.push_back(10.0 * std::log10(e / total));
  }
  return decay;
}

double measure_rt60(std::span<const double> samples, double fs) {
  const std::vector<double> decay = schroeder_decay_db(samples);

  std::size_t i5 = decay.size();
  std::size_t i25 = decay.size();
  for (std::size_t i = 0; i < decay.size(); ++i) {
    if (i5 == decay.size() && decay[i] <= -5.0) i5 = i;
    if (decay[i] <= -25.0) {
      i25 = i;
      break;
    }
  }
  if (i25 == decay.size() || i25 <= i5 || i25 - i5 < 10) {
    throw InsufficientDecayError("decay never spans -5 dB .. -25 dB within the window");
  }

  // Least-squares line through the fit segment.
  double sum_t = 0.0, sum_d = 0.0, sum_tt = 0.0, sum_td = 0.0;
  const double n = static_cast<double>(i25 - i5 + 1);
  for (std::size_t i = i5; i <= i25; ++i) {
    const double t = static_cast<double>(i) / fs;
    sum_t += t;
    sum_d += decay[i];
    sum_tt += t * t;
    sum_td += t * decay[i];
  }
  const double denom = n * sum_tt - sum_t * sum_t;
  const double slope = (n * sum_td - sum_t * sum_d) / denom;  // dB per second
  if (!(slope < 0.0) || !std::isfinite(slope)) {
    throw InsufficientDecayError("non-decaying energy curve");
  }
  return -60.0 / slope;
}

double measure_rt60(const Rir& rir) { return measure_rt60(rir.samples, rir.fs); }

}  // namespace roomgeo
