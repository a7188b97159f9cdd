#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fitact/fixed_point.hpp"

namespace fitact {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& s);
std::size_t shape_size(const Shape& s);

/// Dense row-major array of doubles. The currency of all layer math.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::size_t ndim() const { return shape_.size(); }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// Same buffer, new shape; element counts must agree.
  Tensor reshaped(Shape new_shape) const;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
};

Tensor zeros_like(const Tensor& t);

/// 2-D matrix product, shapes (m,k) x (k,n) -> (m,n).
Tensor matmul(const Tensor& a, const Tensor& b);

/// Elementwise sum; shapes must match exactly.
Tensor add(const Tensor& a, const Tensor& b);

/// 2-D cross-correlation. input (C,H,W) or (B,C,H,W), kernels
/// (OC,C,KH,KW); output spatial extent floor((in + 2*pad - k)/stride) + 1.
Tensor conv2d(const Tensor& input, const Tensor& kernels, int stride, int padding);

/// Max pooling over (window x window) patches with the given stride; input
/// (C,H,W) or (B,C,H,W).
Tensor maxpool2d(const Tensor& input, int window, int stride);

/// Shaped buffer of Q15.16 words: the storage form of network parameters and
/// the unit the fault injector operates on.
struct FixedTensor {
  Shape shape;
  std::vector<FixedPoint32> words;

  std::size_t size() const { return words.size(); }
  bool empty() const { return words.empty(); }

  Tensor decode() const;
  static FixedTensor encode(const Tensor& t);

  friend bool operator==(const FixedTensor& a, const FixedTensor& b) {
    return a.shape == b.shape && a.words == b.words;
  }
};

}  // namespace fitact
