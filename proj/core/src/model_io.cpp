#include "fitact/model_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "fitact/errors.hpp"

namespace fitact {

namespace {

constexpr unsigned char kMagic[4] = {'F', 'I', 'T', 'A'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) throw FormatError(FormatError::Kind::truncated, "model file truncated in " + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& in, const std::string& what) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (in.gcount() != 8) throw FormatError(FormatError::Kind::truncated, "model file truncated in " + what);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void put_tensor(std::ostream& out, const FixedTensor& t) {
  put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
  for (std::size_t d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
  put_u32(out, static_cast<std::uint32_t>(t.words.size()));
  for (const FixedPoint32& w : t.words) put_u32(out, w.raw_bits);
}

FixedTensor get_tensor(std::istream& in, const std::string& what) {
  FixedTensor t;
  const std::uint32_t ndims = get_u32(in, what);
  if (ndims > 8) throw FormatError(FormatError::Kind::bad_value, what + ": implausible rank " + std::to_string(ndims));
  for (std::uint32_t i = 0; i < ndims; ++i) t.shape.push_back(get_u32(in, what));
  const std::uint32_t count = get_u32(in, what);
  const std::size_t expected = ndims == 0 ? 0 : shape_size(t.shape);
  if (count != expected) {
    throw FormatError(FormatError::Kind::bad_value,
                      what + ": element count " + std::to_string(count) + " does not match shape");
  }
  t.words.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) t.words[i].raw_bits = get_u32(in, what);
  return t;
}

}  // namespace

void save_model(const Network& net, std::ostream& out) {
  out.write(reinterpret_cast<const char*>(kMagic), 4);
  put_u32(out, kVersion);
  put_u32(out, net.granularity == BoundGranularity::per_channel ? 1u : 0u);
  put_u32(out, static_cast<std::uint32_t>(net.input_shape.size()));
  for (std::size_t d : net.input_shape) put_u32(out, static_cast<std::uint32_t>(d));
  put_u32(out, static_cast<std::uint32_t>(net.layers.size()));
  for (const Layer& l : net.layers) {
    put_u32(out, static_cast<std::uint32_t>(l.kind));
    put_u32(out, static_cast<std::uint32_t>(l.activation.kind));
    put_u32(out, static_cast<std::uint32_t>(l.activation.mode));
    put_f64(out, l.activation.global_bound);
    put_f64(out, l.activation.slope);
    put_u32(out, static_cast<std::uint32_t>(l.stride));
    put_u32(out, static_cast<std::uint32_t>(l.padding));
    put_u32(out, static_cast<std::uint32_t>(l.window));
    put_tensor(out, l.weights);
    put_tensor(out, l.bias);
    put_tensor(out, l.lambda);
  }
  if (!out) throw IoError("write failure while saving model");
}

void save_model(const Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  save_model(net, out);
  out.flush();
  if (!out) throw IoError("write failure while saving " + path);
}

Network load_model(std::istream& in) {
  unsigned char magic[4];
  in.read(reinterpret_cast<char*>(magic), 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError(FormatError::Kind::bad_magic, "not a model file (bad magic)");
  }
  const std::uint32_t version = get_u32(in, "header");
  if (version != kVersion) {
    throw FormatError(FormatError::Kind::bad_version,
                      "unsupported model version " + std::to_string(version) + " (expected " +
                          std::to_string(kVersion) + ")");
  }
  Network net;
  const std::uint32_t flags = get_u32(in, "header");
  net.granularity = (flags & 1u) ? BoundGranularity::per_channel : BoundGranularity::per_neuron;
  const std::uint32_t in_dims = get_u32(in, "header");
  if (in_dims == 0 || in_dims > 8) {
    throw FormatError(FormatError::Kind::bad_value, "implausible input rank " + std::to_string(in_dims));
  }
  for (std::uint32_t i = 0; i < in_dims; ++i) net.input_shape.push_back(get_u32(in, "header"));
  const std::uint32_t layer_count = get_u32(in, "header");
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    const std::string where = "layer " + std::to_string(i);
    Layer l;
    const std::uint32_t kind = get_u32(in, where);
    if (kind > static_cast<std::uint32_t>(LayerKind::flatten)) {
      throw FormatError(FormatError::Kind::bad_value, where + ": unknown layer kind " + std::to_string(kind));
    }
    l.kind = static_cast<LayerKind>(kind);
    const std::uint32_t act = get_u32(in, where);
    if (act > static_cast<std::uint32_t>(ActivationKind::fitrelu)) {
      throw FormatError(FormatError::Kind::bad_value, where + ": unknown activation kind " + std::to_string(act));
    }
    l.activation.kind = static_cast<ActivationKind>(act);
    const std::uint32_t mode = get_u32(in, where);
    if (mode > 1) throw FormatError(FormatError::Kind::bad_value, where + ": unknown gbrelu mode");
    l.activation.mode = static_cast<GBReluMode>(mode);
    l.activation.global_bound = get_f64(in, where);
    l.activation.slope = get_f64(in, where);
    l.stride = static_cast<int>(get_u32(in, where));
    l.padding = static_cast<int>(get_u32(in, where));
    l.window = static_cast<int>(get_u32(in, where));
    l.weights = get_tensor(in, where + " weights");
    l.bias = get_tensor(in, where + " bias");
    l.lambda = get_tensor(in, where + " lambda");
    net.layers.push_back(std::move(l));
  }
  net.validate();
  return net;
}

Network load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return load_model(in);
}

std::size_t serialized_size(const Network& net) {
  std::ostringstream out(std::ios::binary);
  save_model(net, out);
  return out.str().size();
}

}  // namespace fitact
