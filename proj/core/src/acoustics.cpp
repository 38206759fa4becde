#include "roomgeo/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace roomgeo {

namespace {

void require_positive_dims(const Vec3& dims) {
  for (double d : dims) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw InvalidGeometryError("room dimensions must be strictly positive, got " +
                                 std::to_string(dims[0]) + " x " + std::to_string(dims[1]) +
                                 " x " + std::to_string(dims[2]));
    }
  }
}

}  // namespace

Vec3 sort_ascending(const Vec3& dims) {
  require_positive_dims(dims);
  Vec3 out = dims;
  std::sort(out.begin(), out.end());
  return out;
}

double surface_area(const Vec3& dims) {
  require_positive_dims(dims);
  return 2.0 * (dims[0] * dims[1] + dims[0] * dims[2] + dims[1] * dims[2]);
}

double volume(const Vec3& dims) {
  require_positive_dims(dims);
  return dims[0] * dims[1] * dims[2];
}

RoomSpec RoomSpec::make(const Vec3& dims, const std::array<double, 6>& beta,
                        std::optional<double> rt60_target) {
  RoomSpec room;
  room.dims = dims;
  room.label = sort_ascending(dims);
  room.beta = beta;
  room.rt60_target = rt60_target;
  room.validate();
  return room;
}

void RoomSpec::validate() const {
  require_positive_dims(dims);
  Vec3 sorted = sort_ascending(dims);
  if (sorted != label) {
    throw InvalidGeometryError("label must be dims sorted ascending");
  }
  for (double b : beta) {
    if (!(b >= 0.0) || !(b < 1.0)) {
      throw InvalidGeometryError("reflection coefficients must lie in [0, 1), got " +
                                 std::to_string(b));
    }
  }
  if (rt60_target && !(*rt60_target > 0.0)) {
    throw InvalidGeometryError("rt60 target must be positive");
  }
}

void SourceReceiverPair::validate(const RoomSpec& room) const {
  for (int axis = 0; axis < 3; ++axis) {
    const double hi = room.dims[static_cast<std::size_t>(axis)] - kWallMargin;
    if (source[static_cast<std::size_t>(axis)] < kWallMargin ||
        source[static_cast<std::size_t>(axis)] > hi ||
        receiver[static_cast<std::size_t>(axis)] < kWallMargin ||
        receiver[static_cast<std::size_t>(axis)] > hi) {
      throw InvalidGeometryError("source/receiver must keep >= 0.5 m wall clearance");
    }
  }
  if (distance(source, receiver) < kMinPairSeparation) {
    throw InvalidGeometryError("source and receiver closer than 0.3 m");
  }
}

Vec3 sample_interior_point(const Vec3& dims, Rng& rng) {
  Vec3 p;
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = kWallMargin;
    const double hi = dims[static_cast<std::size_t>(axis)] - kWallMargin;
    if (!(hi > lo)) {
      throw InvalidGeometryError("room too small for 0.5 m wall clearance");
    }
    p[static_cast<std::size_t>(axis)] = rng.uniform(lo, hi);
  }
  return p;
}

SourceReceiverPair sample_pair(const Vec3& dims, Rng& rng) {
  const Vec3 source = sample_interior_point(dims, rng);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Vec3 receiver = sample_interior_point(dims, rng);
    if (distance(source, receiver) >= kMinPairSeparation) {
      return SourceReceiverPair{source, receiver};
    }
  }
  throw InvalidGeometryError("could not place a receiver 0.3 m away from the source");
}

}  // namespace roomgeo
