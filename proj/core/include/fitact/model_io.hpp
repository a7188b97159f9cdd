#pragma once

#include <iosfwd>
#include <string>

#include "fitact/network.hpp"

namespace fitact {

/// Binary model format, version 1. All multi-byte values little-endian;
/// parameter blocks are raw Q15.16 words, so a load(save(net)) round trip
/// reproduces every stored bit. Layout documented in the README.
void save_model(const Network& net, std::ostream& out);
void save_model(const Network& net, const std::string& path);

Network load_model(std::istream& in);
Network load_model(const std::string& path);

/// Size of the serialized model in bytes; the memory-overhead metric.
std::size_t serialized_size(const Network& net);

}  // namespace fitact
