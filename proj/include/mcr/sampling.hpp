#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcr/mask.hpp"

namespace mcr::sampling {

struct DensityParams {
  double k_r = 0.14;   // calibration radius, fraction of max normalized radius
  int degree = 5;      // polynomial degree
  double target_r = 10.0;
};

// (R -> k_r, d) defaults: 2x..10x -> (0.14, 5); 20x -> (0.10, 9);
// 30x -> (0.10, 10); 40x -> (0.10, 15); 50x -> (0.06, 20).
DensityParams default_params(double target_r);

struct CalibrationError : std::runtime_error {
  double best_achieved_r;
  CalibrationError(const std::string& msg, double best)
      : std::runtime_error(msg), best_achieved_r(best) {}
};

// Polynomial density profile: 1 inside the calibration disc, otherwise
// min(1, (1 - (r - k_r)/(1 - k_r))^d * scale + 1e-3).
double density_profile(double r, const DensityParams& params,
                       double scale = 1.0);

// Variable-density Poisson-disc mask; deterministic in (h, w, params, seed).
SamplingMask generate_mask(int height, int width, const DensityParams& params,
                           uint64_t seed);

std::vector<SamplingMask> mask_bank(int height, int width,
                                    const DensityParams& params, int count,
                                    uint64_t base_seed);

// <name>.mask.bin (H*W bytes, 0/1, row-major) + <name>.mask.json sidecar.
void save_mask(const SamplingMask& mask, const std::string& path_base);
SamplingMask load_mask(const std::string& path_base);

}  // namespace mcr::sampling
