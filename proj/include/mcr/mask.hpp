#pragma once

#include <cstdint>
#include <vector>

#include "mcr/tensor.hpp"

namespace mcr {

// Boolean k-space sampling pattern, centered like the k-space grids it is
// applied to. achieved_R = H*W / popcount(bits).
struct SamplingMask {
  int h = 0;
  int w = 0;
  std::vector<uint8_t> bits;  // row-major, 0/1
  double target_r = 1.0;
  double achieved_r = 1.0;
  double k_r = 0.0;   // calibration radius, fraction of max normalized radius
  int degree = 1;     // polynomial degree of the density profile
  uint64_t seed = 0;

  bool on(int r, int c) const {
    return bits[static_cast<size_t>(r) * w + c] != 0;
  }
  long ones() const {
    long n = 0;
    for (uint8_t b : bits) n += b;
    return n;
  }
};

SamplingMask full_mask(int h, int w);

}  // namespace mcr
