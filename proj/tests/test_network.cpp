#include <doctest.h>

#include <random>
#include <thread>

#include "fitact/network.hpp"
#include "fitact/workloads.hpp"

using namespace fitact;

namespace {

FixedTensor fixed_from(const Shape& shape, std::vector<double> vals) {
  return FixedTensor::encode(Tensor(shape, std::move(vals)));
}

Network single_dense(std::size_t n, ActivationConfig act) {
  Network net({n});
  net.add_dense(n, act);
  Tensor eye({n, n});
  for (std::size_t i = 0; i < n; ++i) eye[i * n + i] = 1.0;
  net.layers[0].weights = FixedTensor::encode(eye);
  return net;
}

Network random_mlp(std::uint64_t seed) {
  Network net = make_mlp({3}, {5, 4}, 3);
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (Layer& l : net.layers) {
    Tensor w(l.weights.shape);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = dist(eng);
    l.weights = FixedTensor::encode(w);
    Tensor b(l.bias.shape);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = dist(eng);
    l.bias = FixedTensor::encode(b);
  }
  return net;
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("identity weights with relu clip negatives") {
  const Network net = single_dense(2, ActivationConfig{ActivationKind::relu});
  const Tensor out = forward(net, Tensor({2}, {1.0, -1.0}));
  CHECK(out.data() == std::vector<double>{1.0, 0.0});
}

TEST_CASE("two dense layers compose") {
  Network net({1});
  net.add_dense(1, ActivationConfig{ActivationKind::relu});
  net.add_dense(1);
  net.layers[0].weights = fixed_from({1, 1}, {2.0});
  net.layers[1].weights = fixed_from({1, 1}, {3.0});
  net.layers[1].bias = fixed_from({1}, {1.0});
  const Tensor out = forward(net, Tensor({1}, {1.0}));
  CHECK(out[0] == doctest::Approx(3.0 * std::max(0.0, 2.0 * 1.0) + 1.0));
}

TEST_CASE("zero input and zero bias give zero logits for every relu-family activation") {
  for (ActivationKind kind :
       {ActivationKind::relu, ActivationKind::gbrelu, ActivationKind::fitrelu_naive, ActivationKind::fitrelu}) {
    ActivationConfig act;
    act.kind = kind;
    act.global_bound = 1.0;
    Network net({3});
    net.add_dense(4, act);
    net.add_dense(2);
    std::mt19937_64 eng(1);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Tensor w0(net.layers[0].weights.shape), w1(net.layers[1].weights.shape);
    for (std::size_t i = 0; i < w0.size(); ++i) w0[i] = dist(eng);
    for (std::size_t i = 0; i < w1.size(); ++i) w1[i] = dist(eng);
    net.layers[0].weights = FixedTensor::encode(w0);
    net.layers[1].weights = FixedTensor::encode(w1);
    if (act.per_neuron_bounded()) net.layers[0].lambda = fixed_from({4}, {1, 1, 1, 1});
    const Tensor out = forward(net, Tensor({3}));
    for (double v : out.data()) CHECK(v == 0.0);
  }
}

TEST_CASE("predict takes the argmax with lowest-index ties") {
  const Network net = single_dense(3, ActivationConfig{});  // identity passthrough
  CHECK(predict(net, Tensor({3}, {0.1, 0.9, 0.3})) == 1);
  const Network net2 = single_dense(2, ActivationConfig{});
  CHECK(predict(net2, Tensor({2}, {0.5, 0.5})) == 0);
}

TEST_CASE("predict equals argmax of forward") {
  const Network net = random_mlp(77);
  std::mt19937_64 eng(78);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int rep = 0; rep < 50; ++rep) {
    Tensor x({3});
    for (std::size_t i = 0; i < 3; ++i) x[i] = dist(eng);
    const Tensor logits = forward(net, x);
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i) {
      if (logits[i] > logits[best]) best = i;
    }
    CHECK(predict(net, x) == best);
  }
}

TEST_CASE("forward is deterministic across calls and threads") {
  const Network net = random_mlp(101);
  const Tensor x({3}, {0.3, -0.8, 1.1});
  const Tensor ref = forward(net, x);
  for (int i = 0; i < 10; ++i) CHECK(forward(net, x) == ref);
  std::vector<Tensor> results(4);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t]() { results[t] = forward(net, x); });
  }
  for (auto& t : threads) t.join();
  for (const Tensor& r : results) CHECK(r == ref);
}

TEST_CASE("forward over layers equals a layer-by-layer oracle") {
  const Network net = random_mlp(55);
  const Tensor x({3}, {0.4, 1.2, -0.9});
  // oracle: apply each dense layer and relu by hand
  std::vector<double> cur(x.data());
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const Tensor w = net.layers[li].weights.decode();
    const Tensor b = net.layers[li].bias.decode();
    const std::size_t out = w.shape()[0], in = w.shape()[1];
    std::vector<double> next(out);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      for (std::size_t i = 0; i < in; ++i) acc += w[o * in + i] * cur[i];
      next[o] = net.layers[li].activation.kind == ActivationKind::relu ? std::max(0.0, acc) : acc;
    }
    cur = std::move(next);
  }
  const Tensor got = forward(net, x);
  for (std::size_t i = 0; i < cur.size(); ++i) {
    CHECK(got[i] == doctest::Approx(cur[i]).epsilon(1e-12));
  }
}

TEST_CASE("batched forward equals per-sample forward") {
  const Network net = random_mlp(91);
  Tensor batch({3, 3});
  std::mt19937_64 eng(92);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (std::size_t i = 0; i < batch.size(); ++i) batch[i] = dist(eng);
  const Tensor logits = forward(net, batch);
  for (std::size_t s = 0; s < 3; ++s) {
    Tensor x({3});
    for (std::size_t i = 0; i < 3; ++i) x[i] = batch[s * 3 + i];
    const Tensor one = forward(net, x);
    for (std::size_t c = 0; c < one.size(); ++c) CHECK(logits[s * one.size() + c] == one[c]);
  }
}

TEST_CASE("census enumerates weights, bias and bounds in order") {
  ActivationConfig act;
  act.kind = ActivationKind::fitrelu;
  Network net({2});
  net.add_dense(3, act);
  net.layers[0].lambda = fixed_from({3}, {1.0, 1.0, 1.0});
  net.validate();
  const auto census = parameter_census(net);
  REQUIRE(census.size() == 3);
  CHECK(census[0].id == "layer0/weights");
  CHECK(census[0].element_count == 6);
  CHECK(census[1].id == "layer0/bias");
  CHECK(census[1].element_count == 3);
  CHECK(census[2].id == "layer0/lambda");
  CHECK(census[2].element_count == 3);
  std::size_t bits = 0;
  for (const auto& e : census) bits += e.bits_total;
  CHECK(bits == 12 * 32);
}

TEST_CASE("pooling-only network has an empty census") {
  Network net({1, 4, 4});
  net.add_maxpool2d(2, 2);
  CHECK(parameter_census(net).empty());
}

TEST_CASE("census bits equal 32 times the parameter count") {
  const Network net = make_cnn({1, 12, 12}, 10);
  std::size_t params = 0;
  for (const Layer& l : net.layers) params += l.weights.size() + l.bias.size() + l.lambda.size();
  std::size_t bits = 0;
  for (const auto& e : parameter_census(net)) bits += e.bits_total;
  CHECK(bits == params * 32);
}

TEST_CASE("every census buffer influences the forward output") {
  // positive weights and inputs keep all paths active
  ActivationConfig act;
  act.kind = ActivationKind::fitrelu;
  act.slope = 10.0;
  Network net({2});
  net.add_dense(3, act);
  net.add_dense(2);
  net.layers[0].weights = fixed_from({3, 2}, {0.2, 0.1, 0.15, 0.25, 0.3, 0.2});
  net.layers[0].bias = fixed_from({3}, {0.05, 0.05, 0.05});
  net.layers[0].lambda = fixed_from({3}, {0.5, 0.5, 0.5});
  net.layers[1].weights = fixed_from({2, 3}, {0.3, 0.2, 0.1, 0.15, 0.25, 0.35});
  net.layers[1].bias = fixed_from({2}, {0.02, 0.03});
  net.validate();
  const Tensor x({2}, {1.0, 1.5});
  const Tensor base = forward(net, x);
  for (const CensusEntry& e : parameter_census(net)) {
    for (std::size_t elem = 0; elem < e.element_count; ++elem) {
      Network mutated = net;
      FixedTensor& buf = param_buffer(mutated, e.layer_index, e.kind);
      buf.words[elem] = flip_bit(buf.words[elem], 31);  // sign flip always moves the value
      const Tensor out = forward(mutated, x);
      bool changed = false;
      for (std::size_t i = 0; i < out.size(); ++i) changed = changed || out[i] != base[i];
      CHECK_MESSAGE(changed, e.id, "[", elem, "] did not influence the output");
    }
  }
}

TEST_CASE("neuron and bound counts") {
  Network net = make_cnn({1, 12, 12}, 10);
  // conv1: 8x12x12, conv2: 16x6x6, dense: 64
  CHECK(net.neuron_count() == 8 * 12 * 12 + 16 * 6 * 6 + 64);
  CHECK(net.bound_count() == net.neuron_count());
  net.granularity = BoundGranularity::per_channel;
  CHECK(net.bound_count() == 8 + 16 + 64);
}

TEST_CASE("validate rejects inconsistent structures") {
  Network net({2});
  ActivationConfig act;
  act.kind = ActivationKind::fitrelu;
  net.add_dense(3, act);
  CHECK_THROWS_AS(net.validate(), ConfigError);  // missing bounds
  net.layers[0].lambda = fixed_from({2}, {1.0, 1.0});
  CHECK_THROWS_AS(net.validate(), ConfigError);  // wrong bound shape
  net.layers[0].lambda = fixed_from({3}, {1.0, 1.0, 1.0});
  CHECK_NOTHROW(net.validate());

  Network gb({2});
  ActivationConfig bad;
  bad.kind = ActivationKind::gbrelu;
  bad.global_bound = 0.0;
  gb.add_dense(2, bad);
  CHECK_THROWS_AS(gb.validate(), ConfigError);

  Network conv({1, 4, 4});
  CHECK_THROWS_AS(conv.add_dense(2), ShapeError);  // needs flatten first
}

TEST_CASE("forward rejects mismatched input shapes") {
  const Network net = random_mlp(7);
  CHECK_THROWS_AS(forward(net, Tensor({4})), ShapeError);
  CHECK_THROWS_AS(forward(net, Tensor({2, 4})), ShapeError);
}

}  // TEST_SUITE
