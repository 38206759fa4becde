// Independent reference implementations used to generate expected values.
// Everything here is deliberately written the slow, obvious way and must
// stay decoupled from the production code paths it checks.
#ifndef ROOMGEO_TESTS_ORACLES_HPP
#define ROOMGEO_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "roomgeo/acoustics.hpp"
#include "roomgeo/simulator.hpp"
#include "roomgeo/tensor.hpp"

namespace oracles {

// Quadruple-loop conv1d reference: out[b,o,j] = bias[o] + sum_{i,k} w[o,i,k] x[b,i,s*j+k].
inline roomgeo::Tensor naive_conv1d(const roomgeo::Tensor& input, const roomgeo::Tensor& weight,
                                    const roomgeo::Tensor& bias, std::int64_t stride) {
  const std::int64_t n = input.dim(0);
  const std::int64_t cin = input.dim(1);
  const std::int64_t len = input.dim(2);
  const std::int64_t cout = weight.dim(0);
  const std::int64_t kernel = weight.dim(2);
  const std::int64_t out_len = len / stride;

  roomgeo::Tensor out({n, cout, out_len});
  for (std::int64_t b = 0; b < n; ++b) {
    for (std::int64_t o = 0; o < cout; ++o) {
      for (std::int64_t j = 0; j < out_len; ++j) {
        double acc = bias[o];
        for (std::int64_t i = 0; i < cin; ++i) {
          for (std::int64_t k = 0; k < kernel; ++k) {
            acc += weight.at(o, i, k) * input.at(b, i, stride * j + k);
          }
        }
        out.at(b, o, j) = acc;
      }
    }
  }
  return out;
}

// Central finite difference of a scalar functional with respect to every
// element of `x`. `f` must re-evaluate from the current contents of `x`.
template <typename Fn>
roomgeo::Tensor numeric_gradient(roomgeo::Tensor& x, Fn f, double h = 1e-5) {
  roomgeo::Tensor grad(x.shape());
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double fp = f();
    x[i] = orig - h;
    const double fm = f();
    x[i] = orig;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

inline double max_rel_error(const roomgeo::Tensor& a, const roomgeo::Tensor& b) {
  double worst = 0.0;
  for (std::int64_t i = 0; i < a.numel(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), 1e-3});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

// Brute-force image-source synthesis: direct triple loop over the lattice,
// per-image pow() for the reflection products and per-tap trig for the
// fractional-delay filter. Mirrors the documented output contract of
// simulate_rir (inclusion rule, causality clamp, pair canonicalization)
// without sharing any of its shortcuts.
inline std::vector<double> brute_force_rir(const roomgeo::RoomSpec& room,
                                           const roomgeo::SourceReceiverPair& pair,
                                           const roomgeo::ImageSourceConfig& cfg) {
  using roomgeo::kSincHalf;
  using roomgeo::kSincTaps;
  constexpr double pi = std::numbers::pi;

  roomgeo::Vec3 src = pair.source;
  roomgeo::Vec3 rcv = pair.receiver;
  if (rcv < src) std::swap(src, rcv);

  const double c_ts = cfg.constants.c / cfg.constants.fs;
  const auto n_samples = static_cast<std::int64_t>(cfg.n_samples);
  const int bound =
      cfg.max_order >= 0 ? cfg.max_order : roomgeo::auto_lattice_bound(room.dims, cfg);

  std::vector<double> samples(cfg.n_samples, 0.0);

  for (int mx = -bound; mx <= bound; ++mx) {
    for (int q = 0; q <= 1; ++q) {
      for (int my = -bound; my <= bound; ++my) {
        for (int j = 0; j <= 1; ++j) {
          for (int mz = -bound; mz <= bound; ++mz) {
            for (int k = 0; k <= 1; ++k) {
              const double ox = (1 - 2 * q) * src[0] - rcv[0] + 2.0 * mx * room.dims[0];
              const double oy = (1 - 2 * j) * src[1] - rcv[1] + 2.0 * my * room.dims[1];
              const double oz = (1 - 2 * k) * src[2] - rcv[2] + 2.0 * mz * room.dims[2];
              const double dist = std::sqrt(ox * ox + oy * oy + oz * oz);
              const double dist_samples = dist / c_ts;
              if (std::floor(dist_samples) >= static_cast<double>(n_samples)) continue;

              const double refl = std::pow(room.beta[0], std::abs(mx - q)) *
                                  std::pow(room.beta[1], std::abs(mx)) *
                                  std::pow(room.beta[2], std::abs(my - j)) *
                                  std::pow(room.beta[3], std::abs(my)) *
                                  std::pow(room.beta[4], std::abs(mz - k)) *
                                  std::pow(room.beta[5], std::abs(mz));
              const double gain = refl / (4.0 * pi * dist);

              if (cfg.fractional_delay == roomgeo::FractionalDelay::kNearestSample) {
                const auto idx = static_cast<std::int64_t>(std::floor(dist_samples + 0.5));
                if (idx >= 0 && idx < n_samples) {
                  samples[static_cast<std::size_t>(idx)] += gain;
                }
              } else {
                const double fdist = std::floor(dist_samples);
                const double frac = dist_samples - fdist;
                const auto start = static_cast<std::int64_t>(fdist) - kSincHalf;
                for (int tap = 0; tap < kSincTaps; ++tap) {
                  const std::int64_t idx = start + tap;
                  if (idx < 0 || idx >= n_samples) continue;
                  const double t = (tap - kSincHalf) - frac;
                  const double window = 0.5 * (1.0 + std::cos(2.0 * pi * t / kSincTaps));
                  const double sinc = (t == 0.0) ? 1.0 : std::sin(pi * t) / (pi * t);
                  samples[static_cast<std::size_t>(idx)] += gain * window * sinc;
                }
              }
            }
          }
        }
      }
    }
  }

  const double direct = roomgeo::distance(src, rcv) / c_ts;
  const auto onset = static_cast<std::size_t>(
      std::min(std::floor(direct), static_cast<double>(cfg.n_samples)));
  std::fill(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(onset), 0.0);
  return samples;
}

}  // namespace oracles

#endif  // ROOMGEO_TESTS_ORACLES_HPP
