#ifndef ROOMGEO_TESTS_TEST_UTIL_HPP
#define ROOMGEO_TESTS_TEST_UTIL_HPP

#include <cmath>

#include "roomgeo/rng.hpp"
#include "roomgeo/tensor.hpp"

namespace test_util {

// Uniform fill in [lo, hi], keeping values at least `kink_margin` away from
// zero so finite differences stay valid across ReLU kinks.
inline void fill_random(roomgeo::Tensor& t, roomgeo::Rng& rng, double lo = -1.0,
                        double hi = 1.0, double kink_margin = 0.0) {
  for (std::int64_t i = 0; i < t.numel(); ++i) {
    double v = rng.uniform(lo, hi);
    if (kink_margin > 0.0 && std::abs(v) < kink_margin) {
      v = v < 0.0 ? v - kink_margin : v + kink_margin;
    }
    t[i] = v;
  }
}

}  // namespace test_util

#endif  // ROOMGEO_TESTS_TEST_UTIL_HPP
