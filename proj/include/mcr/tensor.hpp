#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcr {

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense row-major tensor, up to 4 dims. Shape {C,H,W} for feature maps,
// {H,W} for plain images.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape, T fill = T(0))
      : shape_(std::move(shape)),
        data_(static_cast<size_t>(count(shape_)), fill) {}

  static long count(const std::vector<int>& shape) {
    long n = 1;
    for (int d : shape) {
      if (d <= 0) throw DimensionError("tensor dim must be positive");
      n *= d;
    }
    return n;
  }

  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_.at(static_cast<size_t>(i)); }
  int ndim() const { return static_cast<int>(shape_.size()); }
  long size() const { return static_cast<long>(data_.size()); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](long i) { return data_[static_cast<size_t>(i)]; }
  const T& operator[](long i) const { return data_[static_cast<size_t>(i)]; }

  // {h,w} indexing
  T& at(int r, int c) { return data_[static_cast<size_t>(r) * dim(1) + c]; }
  const T& at(int r, int c) const {
    return data_[static_cast<size_t>(r) * dim(1) + c];
  }
  // {c,h,w} indexing
  T& at(int ch, int r, int c) {
    return data_[(static_cast<size_t>(ch) * dim(1) + r) * dim(2) + c];
  }
  const T& at(int ch, int r, int c) const {
    return data_[(static_cast<size_t>(ch) * dim(1) + r) * dim(2) + c];
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(shape_);
    for (long i = 0; i < size(); ++i) out[i] = static_cast<U>(data_[static_cast<size_t>(i)]);
    return out;
  }

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

inline std::string shape_str(const std::vector<int>& s) {
  std::string r = "[";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) r += "x";
    r += std::to_string(s[i]);
  }
  return r + "]";
}

}  // namespace mcr
