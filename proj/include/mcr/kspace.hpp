#pragma once

#include <complex>
#include <limits>
#include <vector>

#include "mcr/mask.hpp"
#include "mcr/tensor.hpp"

namespace mcr::kspace {

// Centered complex k-space for one slice: DC at index (H/2, W/2).
struct KSpaceGrid {
  int h = 0;
  int w = 0;
  std::vector<std::complex<double>> data;

  KSpaceGrid() = default;
  KSpaceGrid(int h_, int w_) : h(h_), w(w_), data(static_cast<size_t>(h_) * w_) {}
  std::complex<double>& at(int r, int c) {
    return data[static_cast<size_t>(r) * w + c];
  }
  const std::complex<double>& at(int r, int c) const {
    return data[static_cast<size_t>(r) * w + c];
  }
};

struct ComplexImage {
  TensorD re;
  TensorD im;

  ComplexImage() = default;
  ComplexImage(int h, int w) : re({h, w}), im({h, w}) {}
  int h() const { return re.dim(0); }
  int w() const { return re.dim(1); }
};

inline constexpr double kDcInfinity = std::numeric_limits<double>::infinity();

// Unitary centered 2D DFT: K = shift(F(unshift(x))) / sqrt(H*W).
KSpaceGrid forward_fft(const ComplexImage& image);
ComplexImage inverse_fft(const KSpaceGrid& kspace);

KSpaceGrid forward_fft(const TensorD& real_image);

KSpaceGrid apply_mask(const KSpaceGrid& kspace, const SamplingMask& mask);

ComplexImage zero_filled_recon(const KSpaceGrid& acquired,
                               const SamplingMask& mask);

// Projection of Eq.-style data consistency: blend predicted and acquired
// k-space on the sampled set, exact replacement for lambda = inf. Returns the
// real part; *imag_residual (optional) reports max |imag| of the corrected
// image.
TensorD data_consistency(const TensorD& prediction, const KSpaceGrid& acquired,
                         const SamplingMask& mask, double lambda,
                         double* imag_residual = nullptr);

double energy(const KSpaceGrid& k);
double energy(const ComplexImage& x);

}  // namespace mcr::kspace
