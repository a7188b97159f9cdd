#pragma once

#include <vector>

#include "fitact/dataset.hpp"
#include "fitact/network.hpp"

namespace fitact {

/// Fully connected classifier with ReLU hidden layers and an identity output.
Network make_mlp(const Shape& input, const std::vector<std::size_t>& hidden, std::size_t classes);

/// Small convolutional classifier for (1,12,12) glyph inputs:
/// conv 5x5 -> pool -> conv 3x3 -> pool -> flatten -> dense -> dense.
Network make_cnn(const Shape& input, std::size_t classes);

}  // namespace fitact
