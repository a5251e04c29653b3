#pragma once

// Data-parallel inner loops used by the network layers. Every kernel has an
// OpenMP-parallel implementation (namespace kernels) and a plain serial
// reference (namespace kernels::ref) that the tests and the benchmark tool
// compare against.

#include <omp.h>

#include <cstring>

#include "mcr/tensor.hpp"

namespace mcr::kernels {

// C = alpha * A(MxK) * B(KxN) + beta * C, all row-major.
template <typename T>
void gemm(int M, int N, int K, T alpha, const T* A, const T* B, T beta, T* C) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < M; ++i) {
    T* crow = C + static_cast<size_t>(i) * N;
    if (beta == T(0)) {
      std::memset(crow, 0, sizeof(T) * static_cast<size_t>(N));
    } else if (beta != T(1)) {
      for (int j = 0; j < N; ++j) crow[j] *= beta;
    }
    const T* arow = A + static_cast<size_t>(i) * K;
    for (int k = 0; k < K; ++k) {
      const T a = alpha * arow[k];
      if (a == T(0)) continue;
      const T* brow = B + static_cast<size_t>(k) * N;
      for (int j = 0; j < N; ++j) crow[j] += a * brow[j];
    }
  }
}

// C = alpha * A^T(KxM stored) * B(KxN) + beta * C.  A is KxM row-major.
template <typename T>
void gemm_at(int M, int N, int K, T alpha, const T* A, const T* B, T beta,
             T* C) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < M; ++i) {
    T* crow = C + static_cast<size_t>(i) * N;
    if (beta == T(0)) {
      std::memset(crow, 0, sizeof(T) * static_cast<size_t>(N));
    } else if (beta != T(1)) {
      for (int j = 0; j < N; ++j) crow[j] *= beta;
    }
    for (int k = 0; k < K; ++k) {
      const T a = alpha * A[static_cast<size_t>(k) * M + i];
      if (a == T(0)) continue;
      const T* brow = B + static_cast<size_t>(k) * N;
      for (int j = 0; j < N; ++j) crow[j] += a * brow[j];
    }
  }
}

// C = alpha * A(MxK) * B^T(NxK stored) + beta * C.  B is NxK row-major.
template <typename T>
void gemm_bt(int M, int N, int K, T alpha, const T* A, const T* B, T beta,
             T* C) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < M; ++i) {
    const T* arow = A + static_cast<size_t>(i) * K;
    T* crow = C + static_cast<size_t>(i) * N;
    for (int j = 0; j < N; ++j) {
      const T* brow = B + static_cast<size_t>(j) * K;
      T acc = T(0);
      for (int k = 0; k < K; ++k) acc += arow[k] * brow[k];
      crow[j] = alpha * acc + (beta == T(0) ? T(0) : beta * crow[j]);
    }
  }
}

// im2col for zero-padded strided convolution.
// input [IC,H,W] -> col [IC*KH*KW, OH*OW]
template <typename T>
void im2col(const T* input, int IC, int H, int W, int KH, int KW, int stride,
            int pad, T* col) {
  const int OH = (H + 2 * pad - KH) / stride + 1;
  const int OW = (W + 2 * pad - KW) / stride + 1;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < IC * KH * KW; ++c) {
    const int kw = c % KW;
    const int kh = (c / KW) % KH;
    const int ic = c / (KW * KH);
    const T* in = input + static_cast<size_t>(ic) * H * W;
    T* out = col + static_cast<size_t>(c) * OH * OW;
    for (int oh = 0; oh < OH; ++oh) {
      const int ih = oh * stride - pad + kh;
      if (ih < 0 || ih >= H) {
        std::memset(out + static_cast<size_t>(oh) * OW, 0,
                    sizeof(T) * static_cast<size_t>(OW));
        continue;
      }
      for (int ow = 0; ow < OW; ++ow) {
        const int iw = ow * stride - pad + kw;
        out[static_cast<size_t>(oh) * OW + ow] =
            (iw >= 0 && iw < W) ? in[static_cast<size_t>(ih) * W + iw] : T(0);
      }
    }
  }
}

// Scatter-add inverse of im2col. col [IC*KH*KW, OH*OW] -> input [IC,H,W].
// Parallel over input channels (each channel's scatter is independent).
template <typename T>
void col2im(const T* col, int IC, int H, int W, int KH, int KW, int stride,
            int pad, T* input) {
  const int OH = (H + 2 * pad - KH) / stride + 1;
  const int OW = (W + 2 * pad - KW) / stride + 1;
  std::memset(input, 0, sizeof(T) * static_cast<size_t>(IC) * H * W);
#pragma omp parallel for schedule(static)
  for (int ic = 0; ic < IC; ++ic) {
    T* in = input + static_cast<size_t>(ic) * H * W;
    for (int kh = 0; kh < KH; ++kh) {
      for (int kw = 0; kw < KW; ++kw) {
        const T* src =
            col + (static_cast<size_t>(ic) * KH * KW + kh * KW + kw) * OH * OW;
        for (int oh = 0; oh < OH; ++oh) {
          const int ih = oh * stride - pad + kh;
          if (ih < 0 || ih >= H) continue;
          for (int ow = 0; ow < OW; ++ow) {
            const int iw = ow * stride - pad + kw;
            if (iw >= 0 && iw < W)
              in[static_cast<size_t>(ih) * W + iw] +=
                  src[static_cast<size_t>(oh) * OW + ow];
          }
        }
      }
    }
  }
}

namespace ref {

template <typename T>
void gemm(int M, int N, int K, T alpha, const T* A, const T* B, T beta, T* C) {
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < N; ++j) {
      T acc = T(0);
      for (int k = 0; k < K; ++k)
        acc += A[static_cast<size_t>(i) * K + k] *
               B[static_cast<size_t>(k) * N + j];
      T& c = C[static_cast<size_t>(i) * N + j];
      c = alpha * acc + (beta == T(0) ? T(0) : beta * c);
    }
  }
}

// Direct convolution, no im2col. weight [OC,IC,KH,KW].
template <typename T>
void conv2d(const T* input, int IC, int H, int W, const T* weight,
            const T* bias, int OC, int KH, int KW, int stride, int pad,
            T* output) {
  const int OH = (H + 2 * pad - KH) / stride + 1;
  const int OW = (W + 2 * pad - KW) / stride + 1;
  for (int oc = 0; oc < OC; ++oc) {
    for (int oh = 0; oh < OH; ++oh) {
      for (int ow = 0; ow < OW; ++ow) {
        T acc = bias ? bias[oc] : T(0);
        for (int ic = 0; ic < IC; ++ic) {
          for (int kh = 0; kh < KH; ++kh) {
            const int ih = oh * stride - pad + kh;
            if (ih < 0 || ih >= H) continue;
            for (int kw = 0; kw < KW; ++kw) {
              const int iw = ow * stride - pad + kw;
              if (iw < 0 || iw >= W) continue;
              acc += input[(static_cast<size_t>(ic) * H + ih) * W + iw] *
                     weight[((static_cast<size_t>(oc) * IC + ic) * KH + kh) *
                                KW +
                            kw];
            }
          }
        }
        output[(static_cast<size_t>(oc) * OH + oh) * OW + ow] = acc;
      }
    }
  }
}

}  // namespace ref

// Convolution via im2col + gemm. weight [OC, IC*KH*KW], col scratch provided
// by the caller when it wants to keep it for the backward pass.
template <typename T>
void conv2d(const T* input, int IC, int H, int W, const T* weight,
            const T* bias, int OC, int KH, int KW, int stride, int pad,
            T* output, T* col) {
  const int OH = (H + 2 * pad - KH) / stride + 1;
  const int OW = (W + 2 * pad - KW) / stride + 1;
  im2col(input, IC, H, W, KH, KW, stride, pad, col);
  gemm<T>(OC, OH * OW, IC * KH * KW, T(1), weight, col, T(0), output);
  if (bias) {
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < OC; ++oc) {
      T* orow = output + static_cast<size_t>(oc) * OH * OW;
      for (int i = 0; i < OH * OW; ++i) orow[i] += bias[oc];
    }
  }
}

}  // namespace mcr::kernels
