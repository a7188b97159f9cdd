#include "fitact/workloads.hpp"

#include "fitact/errors.hpp"

namespace fitact {

Network make_mlp(const Shape& input, const std::vector<std::size_t>& hidden, std::size_t classes) {
  if (input.size() != 1) throw ConfigError("make_mlp needs a flat input shape");
  Network net(input);
  const ActivationConfig relu{ActivationKind::relu};
  for (std::size_t h : hidden) net.add_dense(h, relu);
  net.add_dense(classes);  // identity output
  return net;
}

Network make_cnn(const Shape& input, std::size_t classes) {
  if (input.size() != 3) throw ConfigError("make_cnn needs a (C,H,W) input shape");
  Network net(input);
  const ActivationConfig relu{ActivationKind::relu};
  net.add_conv2d(8, 5, 1, 2, relu);
  net.add_maxpool2d(2, 2);
  net.add_conv2d(16, 3, 1, 1, relu);
  net.add_maxpool2d(2, 2);
  net.add_flatten();
  net.add_dense(64, relu);
  net.add_dense(classes);
  return net;
}

}  // namespace fitact
