#include <doctest.h>

#include <random>

#include "fitact/tensor.hpp"

using namespace fitact;

namespace {

Tensor random_tensor(const Shape& shape, std::mt19937_64& eng) {
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  Tensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(eng);
  return t;
}

// Independent oracle: accumulate in j-major order instead of the library's
// k-major loop.
Tensor matmul_oracle(const Tensor& a, const Tensor& b) {
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      out[i * n + j] = acc;
    }
  }
  return out;
}

// Direct summation over an explicitly padded copy of the input.
Tensor conv2d_oracle(const Tensor& x, const Tensor& kern, int stride, int pad) {
  const std::size_t cin = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
  const std::size_t ph = h + 2 * pad, pw = w + 2 * pad;
  Tensor padded({cin, ph, pw});
  for (std::size_t c = 0; c < cin; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t xx = 0; xx < w; ++xx) {
        padded[(c * ph + y + pad) * pw + xx + pad] = x[(c * h + y) * w + xx];
      }
    }
  }
  const std::size_t cout = kern.shape()[0], kh = kern.shape()[2], kw = kern.shape()[3];
  const std::size_t oh = (ph - kh) / stride + 1, ow = (pw - kw) / stride + 1;
  Tensor out({cout, oh, ow});
  for (std::size_t oc = 0; oc < cout; ++oc) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        double acc = 0.0;
        for (std::size_t ic = 0; ic < cin; ++ic) {
          for (std::size_t ky = 0; ky < kh; ++ky) {
            for (std::size_t kx = 0; kx < kw; ++kx) {
              acc += kern[((oc * cin + ic) * kh + ky) * kw + kx] *
                     padded[(ic * ph + oy * stride + ky) * pw + ox * stride + kx];
            }
          }
        }
        out[(oc * oh + oy) * ow + ox] = acc;
      }
    }
  }
  return out;
}

double max_rel_err(const Tensor& a, const Tensor& b) {
  REQUIRE(a.shape() == b.shape());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / (std::abs(b[i]) + 1e-12));
  }
  return worst;
}

}  // namespace

TEST_SUITE("tensor") {

TEST_CASE("construction checks shape against data") {
  CHECK_THROWS_AS(Tensor({2, 3}, std::vector<double>{1.0}), ShapeError);
  const Tensor t({2, 3});
  CHECK(t.size() == 6);
  CHECK_THROWS_AS(t.reshaped({4}), ShapeError);
  CHECK(t.reshaped({3, 2}).shape() == Shape{3, 2});
}

TEST_CASE("matmul identity") {
  Tensor eye({3, 3});
  for (int i = 0; i < 3; ++i) eye[i * 3 + i] = 1.0;
  const Tensor x({3, 1}, {0.5, -2.0, 7.0});
  CHECK(matmul(eye, x) == x);
}

TEST_CASE("matmul agrees with the oracle on random inputs") {
  std::mt19937_64 eng(5);
  std::uniform_int_distribution<std::size_t> dim(1, 32);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t m = dim(eng), k = dim(eng), n = dim(eng);
    const Tensor a = random_tensor({m, k}, eng);
    const Tensor b = random_tensor({k, n}, eng);
    CHECK(max_rel_err(matmul(a, b), matmul_oracle(a, b)) < 1e-10);
  }
}

TEST_CASE("matmul rejects incompatible shapes with both shapes in the message") {
  const Tensor a({2, 3});
  const Tensor b({2, 3});
  try {
    matmul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("(2,3)") != std::string::npos);
  }
}

TEST_CASE("add identity and mismatch") {
  std::mt19937_64 eng(7);
  const Tensor x = random_tensor({4, 5}, eng);
  CHECK(add(x, zeros_like(x)) == x);
  CHECK_THROWS_AS(add(x, Tensor({5, 4})), ShapeError);
}

TEST_CASE("conv2d all-ones 3x3 gives 9") {
  const Tensor x({1, 3, 3}, std::vector<double>(9, 1.0));
  const Tensor k({1, 1, 3, 3}, std::vector<double>(9, 1.0));
  const Tensor y = conv2d(x, k, 1, 0);
  CHECK(y.shape() == Shape{1, 1, 1});
  CHECK(y[0] == doctest::Approx(9.0));
}

TEST_CASE("conv2d agrees with direct summation over strides and padding") {
  std::mt19937_64 eng(9);
  std::uniform_int_distribution<std::size_t> dim(3, 16);
  std::uniform_int_distribution<std::size_t> chan(1, 4);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t h = dim(eng), w = dim(eng), cin = chan(eng), cout = chan(eng);
    const std::size_t k = std::min<std::size_t>(3, std::min(h, w));
    const int stride = 1 + static_cast<int>(rep % 2);
    const int pad = static_cast<int>(rep % 3);
    const Tensor x = random_tensor({cin, h, w}, eng);
    const Tensor kern = random_tensor({cout, cin, k, k}, eng);
    CHECK(max_rel_err(conv2d(x, kern, stride, pad), conv2d_oracle(x, kern, stride, pad)) < 1e-10);
  }
}

TEST_CASE("conv2d output extent follows floor((in + 2p - k)/s) + 1") {
  const Tensor x({1, 11, 7});
  const Tensor k({2, 1, 3, 3});
  const Tensor y = conv2d(x, k, 2, 1);
  CHECK(y.shape() == Shape{2, (11 + 2 - 3) / 2 + 1, (7 + 2 - 3) / 2 + 1});
}

TEST_CASE("conv2d batched equals per-sample") {
  std::mt19937_64 eng(13);
  const Tensor a = random_tensor({2, 6, 6}, eng);
  const Tensor b = random_tensor({2, 6, 6}, eng);
  const Tensor kern = random_tensor({3, 2, 3, 3}, eng);
  Tensor batch({2, 2, 6, 6});
  std::copy(a.data().begin(), a.data().end(), batch.data().begin());
  std::copy(b.data().begin(), b.data().end(), batch.data().begin() + 72);
  const Tensor y = conv2d(batch, kern, 1, 1);
  const Tensor ya = conv2d(a, kern, 1, 1);
  for (std::size_t i = 0; i < ya.size(); ++i) CHECK(y[i] == ya[i]);
  const Tensor yb = conv2d(b, kern, 1, 1);
  for (std::size_t i = 0; i < yb.size(); ++i) CHECK(y[ya.size() + i] == yb[i]);
}

TEST_CASE("maxpool2d picks window maxima") {
  const Tensor x({1, 4, 4}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16});
  const Tensor y = maxpool2d(x, 2, 2);
  CHECK(y.shape() == Shape{1, 2, 2});
  CHECK(y.data() == std::vector<double>{6, 8, 14, 16});
  CHECK_THROWS_AS(maxpool2d(Tensor({1, 2, 2}), 3, 1), ShapeError);
}

TEST_CASE("fixed tensor encode/decode round trip") {
  std::mt19937_64 eng(19);
  const Tensor t = random_tensor({3, 4}, eng);
  const FixedTensor f = FixedTensor::encode(t);
  CHECK(f.shape == t.shape());
  const Tensor back = f.decode();
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(back[i] - t[i]) < 1.0 / 65536.0);
  }
  CHECK(FixedTensor::encode(back) == f);
}

}  // TEST_SUITE
