#ifndef ROOMGEO_ACOUSTICS_HPP
#define ROOMGEO_ACOUSTICS_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "roomgeo/errors.hpp"
#include "roomgeo/rng.hpp"

namespace roomgeo {

using Vec3 = std::array<double, 3>;

inline double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct PhysicalConstants {
  double c = 340.0;              // speed of sound, m/s
  double fs = 8000.0;            // sampling rate, Hz
  double sabine_coeff = 0.1611;  // 24*ln10/c20, s/m
};

// Minimum clearance between sampled points and any wall, and between a
// source and its receiver. Prevents degenerate near-wall geometry.
inline constexpr double kWallMargin = 0.5;          // meters
inline constexpr double kMinPairSeparation = 0.3;   // meters

// Returns the components of `dims` in non-decreasing order.
// Throws InvalidGeometryError if any component is non-positive.
Vec3 sort_ascending(const Vec3& dims);

// S = 2(LxLy + LxLz + LyLz), V = LxLyLz.
double surface_area(const Vec3& dims);
double volume(const Vec3& dims);

// One shoebox room: dimensions as sampled, the ascending-sorted regression
// label, per-wall pressure reflection coefficients ordered
// (x=0, x=Lx, y=0, y=Ly, z=0, z=Lz), and the Sabine target when the room
// was generated for a specific reverberation time.
struct RoomSpec {
  Vec3 dims{};
  Vec3 label{};
  std::array<double, 6> beta{};
  std::optional<double> rt60_target;

  static RoomSpec make(const Vec3& dims, const std::array<double, 6>& beta,
                       std::optional<double> rt60_target = std::nullopt);

  void validate() const;
};

struct SourceReceiverPair {
  Vec3 source{};
  Vec3 receiver{};

  // Checks margins and separation against the given room.
  void validate(const RoomSpec& room) const;
};

// Uniform interior point with kWallMargin clearance from every wall.
Vec3 sample_interior_point(const Vec3& dims, Rng& rng);

// Uniform source/receiver pair with at least kMinPairSeparation between them.
SourceReceiverPair sample_pair(const Vec3& dims, Rng& rng);

// One sampled impulse response plus its generation metadata.
struct Rir {
  std::vector<double> samples;
  double fs = 8000.0;
  RoomSpec room;
  SourceReceiverPair pair;
};

inline constexpr std::size_t kRirLength = 4096;

}  // namespace roomgeo

#endif  // ROOMGEO_ACOUSTICS_HPP
