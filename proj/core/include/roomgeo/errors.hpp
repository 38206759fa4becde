#ifndef ROOMGEO_ERRORS_HPP
#define ROOMGEO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace roomgeo {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-positive dimensions, points outside the room, coincident pairs.
class InvalidGeometryError : public Error {
 public:
  using Error::Error;
};

// Sabine absorption >= 1 for the requested reverberation time.
class InfeasibleRt60Error : public Error {
 public:
  using Error::Error;
};

// Decay curve never reaches the fit range within the analysis window.
class InsufficientDecayError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Operation called out of order (e.g. backward before forward).
class StateError : public Error {
 public:
  using Error::Error;
};

// Batch-norm asked to normalize over fewer than two values per channel.
class DegenerateBatchError : public Error {
 public:
  using Error::Error;
};

class TrainingDivergedError : public Error {
 public:
  using Error::Error;
};

// Requested group size does not divide into the per-room RIR count.
class GroupingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace roomgeo

#endif  // ROOMGEO_ERRORS_HPP
