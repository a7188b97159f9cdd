#include "fitact/tensor.hpp"

#include <algorithm>
#include <limits>

#include "fitact/errors.hpp"

namespace fitact {

std::string shape_to_string(const Shape& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  out += ")";
  return out;
}

std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return s.empty() ? 0 : n;
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_size(shape_) != data_.size()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                     shape_to_string(shape_));
  }
}

Tensor Tensor::reshaped(Shape new_shape) const {
  if (shape_size(new_shape) != data_.size()) {
    throw ShapeError("cannot reshape " + shape_to_string(shape_) + " to " + shape_to_string(new_shape));
  }
  Tensor t;
  t.shape_ = std::move(new_shape);
  t.data_ = data_;
  return t;
}

Tensor zeros_like(const Tensor& t) { return Tensor(t.shape()); }

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.shape()[1] != b.shape()[0]) {
    throw ShapeError("matmul shape mismatch " + shape_to_string(a.shape()) + " x " + shape_to_string(b.shape()));
  }
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        out[i * n + j] += av * b[p * n + j];
      }
    }
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("add shape mismatch " + shape_to_string(a.shape()) + " vs " + shape_to_string(b.shape()));
  }
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

namespace {

// Normalizes (C,H,W) to a single-sample batch; returns whether input was batched.
bool batch_view(const Tensor& t, std::size_t expected_rank, const char* op, Shape& sample_shape, std::size_t& batch) {
  if (t.ndim() == expected_rank) {
    sample_shape = t.shape();
    batch = 1;
    return false;
  }
  if (t.ndim() == expected_rank + 1) {
    sample_shape.assign(t.shape().begin() + 1, t.shape().end());
    batch = t.shape()[0];
    return true;
  }
  throw ShapeError(std::string(op) + ": expected rank " + std::to_string(expected_rank) + " or " +
                   std::to_string(expected_rank + 1) + " input, got " + shape_to_string(t.shape()));
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernels, int stride, int padding) {
  if (stride < 1 || padding < 0) {
    throw ConfigError("conv2d: stride must be >= 1 and padding >= 0");
  }
  Shape in_shape;
  std::size_t batch = 0;
  const bool batched = batch_view(input, 3, "conv2d", in_shape, batch);
  if (kernels.ndim() != 4) {
    throw ShapeError("conv2d kernels must be rank 4, got " + shape_to_string(kernels.shape()));
  }
  const std::size_t cin = in_shape[0], h = in_shape[1], w = in_shape[2];
  const std::size_t cout = kernels.shape()[0], kc = kernels.shape()[1];
  const std::size_t kh = kernels.shape()[2], kw = kernels.shape()[3];
  if (kc != cin) {
    throw ShapeError("conv2d channel mismatch: input " + shape_to_string(input.shape()) + " kernels " +
                     shape_to_string(kernels.shape()));
  }
  const long oh = (static_cast<long>(h) + 2 * padding - static_cast<long>(kh)) / stride + 1;
  const long ow = (static_cast<long>(w) + 2 * padding - static_cast<long>(kw)) / stride + 1;
  if (oh <= 0 || ow <= 0) {
    throw ShapeError("conv2d output would be empty for input " + shape_to_string(input.shape()) + " kernels " +
                     shape_to_string(kernels.shape()));
  }
  const std::size_t uoh = static_cast<std::size_t>(oh), uow = static_cast<std::size_t>(ow);
  Shape out_shape = batched ? Shape{batch, cout, uoh, uow} : Shape{cout, uoh, uow};
  Tensor out(out_shape);

  const std::size_t in_sample = cin * h * w;
  const std::size_t out_sample = cout * uoh * uow;
  for (std::size_t b = 0; b < batch; ++b) {
    const double* x = input.data().data() + b * in_sample;
    double* y = out.data().data() + b * out_sample;
    for (std::size_t oc = 0; oc < cout; ++oc) {
      for (std::size_t oy = 0; oy < uoh; ++oy) {
        for (std::size_t ox = 0; ox < uow; ++ox) {
          double acc = 0.0;
          for (std::size_t ic = 0; ic < cin; ++ic) {
            for (std::size_t ky = 0; ky < kh; ++ky) {
              const long iy = static_cast<long>(oy) * stride + static_cast<long>(ky) - padding;
              if (iy < 0 || iy >= static_cast<long>(h)) continue;
              for (std::size_t kx = 0; kx < kw; ++kx) {
                const long ix = static_cast<long>(ox) * stride + static_cast<long>(kx) - padding;
                if (ix < 0 || ix >= static_cast<long>(w)) continue;
                acc += kernels[((oc * cin + ic) * kh + ky) * kw + kx] * x[(ic * h + iy) * w + ix];
              }
            }
          }
          y[(oc * uoh + oy) * uow + ox] = acc;
        }
      }
    }
  }
  return out;
}

Tensor maxpool2d(const Tensor& input, int window, int stride) {
  if (window < 1 || stride < 1) {
    throw ConfigError("maxpool2d: window and stride must be >= 1");
  }
  Shape in_shape;
  std::size_t batch = 0;
  const bool batched = batch_view(input, 3, "maxpool2d", in_shape, batch);
  const std::size_t c = in_shape[0], h = in_shape[1], w = in_shape[2];
  const long oh = (static_cast<long>(h) - window) / stride + 1;
  const long ow = (static_cast<long>(w) - window) / stride + 1;
  if (oh <= 0 || ow <= 0) {
    throw ShapeError("maxpool2d window larger than input " + shape_to_string(input.shape()));
  }
  const std::size_t uoh = static_cast<std::size_t>(oh), uow = static_cast<std::size_t>(ow);
  Shape out_shape = batched ? Shape{batch, c, uoh, uow} : Shape{c, uoh, uow};
  Tensor out(out_shape);

  const std::size_t in_sample = c * h * w;
  const std::size_t out_sample = c * uoh * uow;
  for (std::size_t b = 0; b < batch; ++b) {
    const double* x = input.data().data() + b * in_sample;
    double* y = out.data().data() + b * out_sample;
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t oy = 0; oy < uoh; ++oy) {
        for (std::size_t ox = 0; ox < uow; ++ox) {
          double best = -std::numeric_limits<double>::infinity();
          for (int ky = 0; ky < window; ++ky) {
            for (int kx = 0; kx < window; ++kx) {
              const std::size_t iy = oy * stride + ky;
              const std::size_t ix = ox * stride + kx;
              best = std::max(best, x[(ch * h + iy) * w + ix]);
            }
          }
          y[(ch * uoh + oy) * uow + ox] = best;
        }
      }
    }
  }
  return out;
}

Tensor FixedTensor::decode() const {
  Tensor t(shape);
  for (std::size_t i = 0; i < words.size(); ++i) t[i] = decode_fixed(words[i]);
  return t;
}

FixedTensor FixedTensor::encode(const Tensor& t) {
  FixedTensor f;
  f.shape = t.shape();
  f.words.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) f.words[i] = encode_fixed(t[i]);
  return f;
}

}  // namespace fitact
