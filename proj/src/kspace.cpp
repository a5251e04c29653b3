#include "mcr/kspace.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace mcr::kspace {

namespace {

void check_even(int h, int w) {
  if (h < 16 || w < 16 || h % 2 != 0 || w % 2 != 0)
    throw DimensionError("k-space dims must be even and >= 16, got " +
                         std::to_string(h) + "x" + std::to_string(w));
}

// The FFTW planner is not thread-safe; plans are cached per (h,w,sign).
struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  fftw_plan get(int h, int w, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(h, w, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    // In-place planning with a throwaway buffer; FFTW_ESTIMATE does not
    // touch the data. The plan is reused with fftw_execute_dft.
    std::vector<fftw_complex> buf(static_cast<size_t>(h) * w);
    fftw_plan p = fftw_plan_dft_2d(h, w, buf.data(), buf.data(), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// out(r,c) = in((r + h/2) % h, (c + w/2) % w); its own inverse for even dims.
void half_shift(const std::complex<double>* in, std::complex<double>* out,
                int h, int w) {
  const int hh = h / 2, hw = w / 2;
  for (int r = 0; r < h; ++r) {
    const int sr = (r + hh) % h;
    for (int c = 0; c < w; ++c) out[static_cast<size_t>(r) * w + c] =
        in[static_cast<size_t>(sr) * w + (c + hw) % w];
  }
}

}  // namespace

KSpaceGrid forward_fft(const ComplexImage& image) {
  const int h = image.h(), w = image.w();
  if (!image.re.same_shape(image.im))
    throw DimensionError("real/imag shape mismatch");
  check_even(h, w);
  std::vector<std::complex<double>> buf(static_cast<size_t>(h) * w);
  for (long i = 0; i < image.re.size(); ++i)
    buf[static_cast<size_t>(i)] = {image.re[i], image.im[i]};
  KSpaceGrid out(h, w);
  // unshift -> FFT -> shift, unitary scale
  std::vector<std::complex<double>> tmp(buf.size());
  half_shift(buf.data(), tmp.data(), h, w);
  fftw_plan p = plan_cache().get(h, w, FFTW_FORWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()),
                   reinterpret_cast<fftw_complex*>(tmp.data()));
  half_shift(tmp.data(), out.data.data(), h, w);
  const double scale = 1.0 / std::sqrt(static_cast<double>(h) * w);
  for (auto& v : out.data) v *= scale;
  return out;
}

KSpaceGrid forward_fft(const TensorD& real_image) {
  ComplexImage img(real_image.dim(0), real_image.dim(1));
  img.re = real_image;
  return forward_fft(img);
}

ComplexImage inverse_fft(const KSpaceGrid& kspace) {
  const int h = kspace.h, w = kspace.w;
  check_even(h, w);
  std::vector<std::complex<double>> tmp(kspace.data.size());
  half_shift(kspace.data.data(), tmp.data(), h, w);
  fftw_plan p = plan_cache().get(h, w, FFTW_BACKWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()),
                   reinterpret_cast<fftw_complex*>(tmp.data()));
  std::vector<std::complex<double>> shifted(tmp.size());
  half_shift(tmp.data(), shifted.data(), h, w);
  ComplexImage out(h, w);
  const double scale = 1.0 / std::sqrt(static_cast<double>(h) * w);
  for (long i = 0; i < out.re.size(); ++i) {
    out.re[i] = shifted[static_cast<size_t>(i)].real() * scale;
    out.im[i] = shifted[static_cast<size_t>(i)].imag() * scale;
  }
  return out;
}

KSpaceGrid apply_mask(const KSpaceGrid& kspace, const SamplingMask& mask) {
  if (kspace.h != mask.h || kspace.w != mask.w)
    throw DimensionError("mask/k-space shape mismatch");
  KSpaceGrid out(kspace.h, kspace.w);
  for (size_t i = 0; i < kspace.data.size(); ++i)
    out.data[i] = mask.bits[i] ? kspace.data[i] : std::complex<double>(0.0);
  return out;
}

ComplexImage zero_filled_recon(const KSpaceGrid& acquired,
                               const SamplingMask& mask) {
  return inverse_fft(apply_mask(acquired, mask));
}

TensorD data_consistency(const TensorD& prediction, const KSpaceGrid& acquired,
                         const SamplingMask& mask, double lambda,
                         double* imag_residual) {
  if (lambda < 0.0) throw ParameterError("data-consistency lambda must be >= 0");
  if (prediction.ndim() != 2)
    throw DimensionError("prediction must be a 2D image");
  if (prediction.dim(0) != acquired.h || prediction.dim(1) != acquired.w ||
      mask.h != acquired.h || mask.w != acquired.w)
    throw DimensionError("data_consistency shape mismatch");

  KSpaceGrid y = forward_fft(prediction);
  const bool replace = std::isinf(lambda);
  for (size_t i = 0; i < y.data.size(); ++i) {
    if (!mask.bits[i]) continue;
    y.data[i] = replace ? acquired.data[i]
                        : (y.data[i] + lambda * acquired.data[i]) /
                              (1.0 + lambda);
  }
  ComplexImage img = inverse_fft(y);
  if (imag_residual) {
    double m = 0.0;
    for (long i = 0; i < img.im.size(); ++i)
      m = std::max(m, std::abs(img.im[i]));
    *imag_residual = m;
  }
  return img.re;
}

double energy(const KSpaceGrid& k) {
  double e = 0.0;
  for (const auto& v : k.data) e += std::norm(v);
  return e;
}

double energy(const ComplexImage& x) {
  double e = 0.0;
  for (long i = 0; i < x.re.size(); ++i)
    e += x.re[i] * x.re[i] + x.im[i] * x.im[i];
  return e;
}

}  // namespace mcr::kspace
