#include "roomgeo/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace roomgeo {

namespace {

constexpr double kPi = std::numbers::pi;

void require_inside(const RoomSpec& room, const Vec3& p, const char* who) {
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (!(p[axis] > 0.0) || !(p[axis] < room.dims[axis])) {
      throw InvalidGeometryError(std::string(who) + " must lie strictly inside the room");
    }
  }
}

struct AxisImages {
  // Indexed [q][m + bound]: mirrored offset in meters and reflection product.
  std::vector<double> offset[2];
  std::vector<double> refl[2];
  int bound = 0;
};

AxisImages axis_images(double src, double rcv, double room_len, double beta_lo,
                       double beta_hi, int bound) {
  AxisImages ax;
  ax.bound = bound;
  for (int q = 0; q <= 1; ++q) {
    ax.offset[q].resize(static_cast<std::size_t>(2 * bound + 1));
    ax.refl[q].resize(static_cast<std::size_t>(2 * bound + 1));
    for (int m = -bound; m <= bound; ++m) {
      const std::size_t i = static_cast<std::size_t>(m + bound);
      ax.offset[q][i] = (1 - 2 * q) * src - rcv + 2.0 * m * room_len;
      ax.refl[q][i] =
          std::pow(beta_lo, std::abs(m - q)) * std::pow(beta_hi, std::abs(m));
    }
  }
  return ax;
}

// Visits every image source whose quantized onset floor(d/cTs) falls before
// n_samples, in a fixed deterministic order. fn(dist_m, amplitude, order).
template <typename Fn>
void for_each_image(const RoomSpec& room, const SourceReceiverPair& pair,
                    const ImageSourceConfig& cfg, Fn&& fn) {
  room.validate();
  require_inside(room, pair.source, "source");
  require_inside(room, pair.receiver, "receiver");
  if (distance(pair.source, pair.receiver) <= 0.0) {
    throw InvalidGeometryError("source and receiver coincide");
  }

  const double c_ts = cfg.constants.c / cfg.constants.fs;  // meters per sample
  const double max_dist = static_cast<double>(cfg.n_samples) * c_ts;
  // Conservative pruning radius; the exact per-image inclusion rule below
  // decides the boundary cases.
  const double prune2 = max_dist * max_dist * (1.0 + 1e-9);
  const int bound = cfg.max_order >= 0 ? cfg.max_order : auto_lattice_bound(room.dims, cfg);

  const AxisImages ax =
      axis_images(pair.source[0], pair.receiver[0], room.dims[0], room.beta[0], room.beta[1], bound);
  const AxisImages ay =
      axis_images(pair.source[1], pair.receiver[1], room.dims[1], room.beta[2], room.beta[3], bound);
  const AxisImages az =
      axis_images(pair.source[2], pair.receiver[2], room.dims[2], room.beta[4], room.beta[5], bound);

  for (int mx = -bound; mx <= bound; ++mx) {
    for (int q = 0; q <= 1; ++q) {
      const std::size_t ix = static_cast<std::size_t>(mx + bound);
      const double ox = ax.offset[q][ix];
      const double ox2 = ox * ox;
      if (ox2 > prune2) continue;
      const double rx = ax.refl[q][ix];
      for (int my = -bound; my <= bound; ++my) {
        for (int j = 0; j <= 1; ++j) {
          const std::size_t iy = static_cast<std::size_t>(my + bound);
          const double oy = ay.offset[j][iy];
          const double oxy2 = ox2 + oy * oy;
          if (oxy2 > prune2) continue;
          const double rxy = rx * ay.refl[j][iy];
          for (int mz = -bound; mz <= bound; ++mz) {
            for (int k = 0; k <= 1; ++k) {
              const std::size_t iz = static_cast<std::size_t>(mz + bound);
              const double oz = az.offset[k][iz];
              const double d2 = oxy2 + oz * oz;
              if (d2 > prune2) continue;

              const double dist = std::sqrt(d2);
              const double dist_samples = dist / c_ts;
              if (std::floor(dist_samples) >= static_cast<double>(cfg.n_samples)) continue;

              const double refl = rxy * az.refl[k][iz];
              const double amplitude = refl / (4.0 * kPi * dist);
              const int order = std::abs(2 * mx - q) + std::abs(2 * my - j) + std::abs(2 * mz - k);
              fn(dist, amplitude, order);
            }
          }
        }
      }
    }
  }
}

struct SincTables {
  double cosw[kSincTaps];
  double sinw[kSincTaps];
  SincTables() {
    for (int i = 0; i < kSincTaps; ++i) {
      const double phase = 2.0 * kPi * (i - kSincHalf) / kSincTaps;
      cosw[i] = std::cos(phase);
      sinw[i] = std::sin(phase);
    }
  }
};

const SincTables& sinc_tables() {
  static const SincTables tables;
  return tables;
}

// Adds one arrival at fractional sample position dist_samples.
void place_windowed_sinc(std::vector<double>& samples, double dist_samples, double amplitude) {
  const double fdist = std::floor(dist_samples);
  const double frac = dist_samples - fdist;
  const std::int64_t start = static_cast<std::int64_t>(fdist) - kSincHalf;
  const std::int64_t n = static_cast<std::int64_t>(samples.size());

  if (frac == 0.0) {
    const std::int64_t idx = static_cast<std::int64_t>(fdist);
    if (idx >= 0 && idx < n) samples[static_cast<std::size_t>(idx)] += amplitude;
    return;
  }

  const SincTables& tab = sinc_tables();
  // sin(pi*(i - half - frac)) alternates sign with i; the magnitude is
  // constant, so one sin() covers all taps.
  const double sin_pi_frac = std::sin(kPi * frac);
  const double cf = std::cos(2.0 * kPi * frac / kSincTaps);
  const double sf = std::sin(2.0 * kPi * frac / kSincTaps);
  double sign = (kSincHalf % 2 == 0) ? -1.0 : 1.0;  // -(-1)^(i-half) at i = 0

  for (int i = 0; i < kSincTaps; ++i, sign = -sign) {
    const std::int64_t idx = start + i;
    if (idx >= 0 && idx < n) {
      const double t = (i - kSincHalf) - frac;
      const double window = 0.5 * (1.0 + tab.cosw[i] * cf + tab.sinw[i] * sf);
      const double sinc = sign * sin_pi_frac / (kPi * t);
      samples[static_cast<std::size_t>(idx)] += amplitude * window * sinc;
    }
  }
}

}  // namespace

int auto_lattice_bound(const Vec3& dims, const ImageSourceConfig& cfg) {
  const double window_dist =
      cfg.constants.c * static_cast<double>(cfg.n_samples) / cfg.constants.fs;
  const double min_dim = *std::min_element(dims.begin(), dims.end());
  return static_cast<int>(std::ceil(window_dist / (2.0 * min_dim))) + 1;
}

double sabine_rt60(const Vec3& dims, double avg_absorption,
                   const PhysicalConstants& constants) {
  if (!(avg_absorption > 0.0)) {
    throw InfeasibleRt60Error("average absorption must be positive");
  }
  return constants.sabine_coeff * volume(dims) / (surface_area(dims) * avg_absorption);
}

std::array<double, 6> rt60_to_beta(const Vec3& dims, double rt60,
                                   const PhysicalConstants& constants) {
  if (!(rt60 > 0.0)) throw InfeasibleRt60Error("rt60 must be positive");
  const double absorption =
      constants.sabine_coeff * volume(dims) / (surface_area(dims) * rt60);
  if (absorption >= 1.0) {
    throw InfeasibleRt60Error("rt60 " + std::to_string(rt60) +
                              " s infeasible for this room (absorption " +
                              std::to_string(absorption) + " >= 1)");
  }
  const double beta = std::sqrt(1.0 - absorption);
  std::array<double, 6> out;
  out.fill(beta);
  return out;
}

std::vector<ImageSource> list_images(const RoomSpec& room, const SourceReceiverPair& pair,
                                     const ImageSourceConfig& cfg) {
  std::vector<ImageSource> images;
  for_each_image(room, pair, cfg, [&](double dist, double amplitude, int order) {
    images.push_back(ImageSource{dist, amplitude, order});
  });
  return images;
}

Rir simulate_rir(const RoomSpec& room, const SourceReceiverPair& pair,
                 const ImageSourceConfig& cfg) {
  // Reciprocity: the response depends only on the unordered pair, so pick a
  // canonical ordering before any arithmetic.
  SourceReceiverPair canon = pair;
  if (canon.receiver < canon.source) std::swap(canon.source, canon.receiver);

  Rir rir;
  rir.fs = cfg.constants.fs;
  rir.room = room;
  rir.pair = pair;
  rir.samples.assign(cfg.n_samples, 0.0);

  const double c_ts = cfg.constants.c / cfg.constants.fs;
  const bool nearest = cfg.fractional_delay == FractionalDelay::kNearestSample;

  for_each_image(room, canon, cfg, [&](double dist, double amplitude, int) {
    const double dist_samples = dist / c_ts;
    if (nearest) {
      const auto idx = static_cast<std::int64_t>(std::floor(dist_samples + 0.5));
      if (idx >= 0 && idx < static_cast<std::int64_t>(cfg.n_samples)) {
        rir.samples[static_cast<std::size_t>(idx)] += amplitude;
      }
    } else {
      place_windowed_sinc(rir.samples, dist_samples, amplitude);
    }
  });

  // Nothing arrives before the direct path.
  const double direct = distance(canon.source, canon.receiver) / c_ts;
  const std::size_t onset = static_cast<std::size_t>(
      std::min(std::floor(direct), static_cast<double>(cfg.n_samples)));
  std::fill(rir.samples.begin(), rir.samples.begin() + static_cast<std::ptrdiff_t>(onset), 0.0);

  return rir;
}

}  // namespace roomgeo
