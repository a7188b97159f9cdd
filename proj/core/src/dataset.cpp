#include "fitact/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "fitact/errors.hpp"
#include "fitact/rng.hpp"

namespace fs = std::filesystem;

namespace fitact {

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double val_fraction, std::uint64_t seed) {
  if (ds.empty()) throw DataError("split_dataset: empty dataset");
  if (val_fraction < 0.0 || val_fraction >= 1.0) {
    throw ConfigError("split_dataset: val_fraction must lie in [0,1)");
  }
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 eng(seed);
  std::shuffle(idx.begin(), idx.end(), eng);
  const std::size_t n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(ds.size())));
  Dataset train, val;
  train.num_classes = val.num_classes = ds.num_classes;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    Dataset& dst = i < ds.size() - n_val ? train : val;
    dst.samples.push_back(ds.samples[idx[i]]);
    dst.labels.push_back(ds.labels[idx[i]]);
  }
  return {std::move(train), std::move(val)};
}

Dataset make_blobs(std::size_t n, std::uint64_t seed) {
  static constexpr double kCenters[4][2] = {{1.2, 1.2}, {-1.2, 1.2}, {-1.2, -1.2}, {1.2, -1.2}};
  Dataset ds;
  ds.num_classes = 4;
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> noise(0.0, 0.4);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 4);
    Tensor s({2});
    s[0] = kCenters[label][0] + noise(eng);
    s[1] = kCenters[label][1] + noise(eng);
    ds.samples.push_back(std::move(s));
    ds.labels.push_back(label);
  }
  return ds;
}

namespace {

// 8x8 stencils rendered into a 12x12 canvas with jitter.
const char* const kGlyphs[10][8] = {
    {".######.", "##....##", "##....##", "##....##", "##....##", "##....##", "##....##", ".######."},
    {"...##...", "..###...", ".####...", "...##...", "...##...", "...##...", "...##...", ".######."},
    {".######.", "##....##", "......##", "....###.", "..###...", ".##.....", "##......", "########"},
    {".######.", "##....##", "......##", "..####..", "......##", "......##", "##....##", ".######."},
    {"....###.", "...####.", "..##.##.", ".##..##.", "##...##.", "########", ".....##.", ".....##."},
    {"########", "##......", "##......", "#######.", "......##", "......##", "##....##", ".######."},
    {".######.", "##....##", "##......", "#######.", "##....##", "##....##", "##....##", ".######."},
    {"########", "......##", ".....##.", "....##..", "...##...", "..##....", ".##.....", ".##....."},
    {".######.", "##....##", "##....##", ".######.", "##....##", "##....##", "##....##", ".######."},
    {".######.", "##....##", "##....##", ".#######", "......##", "......##", "##....##", ".######."},
};

constexpr std::size_t kGlyphCanvas = 12;
constexpr std::size_t kGlyphStencil = 8;

}  // namespace

Dataset make_glyphs(std::size_t n, std::uint64_t seed) {
  Dataset ds;
  ds.num_classes = 10;
  std::mt19937_64 eng(seed);
  std::uniform_int_distribution<int> offset(0, static_cast<int>(kGlyphCanvas - kGlyphStencil));
  std::uniform_real_distribution<double> contrast(0.75, 1.0);
  std::normal_distribution<double> noise(0.0, 0.12);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 10);
    const int dy = offset(eng), dx = offset(eng);
    const double amp = contrast(eng);
    Tensor s({1, kGlyphCanvas, kGlyphCanvas});
    for (std::size_t y = 0; y < kGlyphStencil; ++y) {
      for (std::size_t x = 0; x < kGlyphStencil; ++x) {
        if (kGlyphs[label][y][x] == '#') {
          s[(y + static_cast<std::size_t>(dy)) * kGlyphCanvas + (x + static_cast<std::size_t>(dx))] = amp;
        }
      }
    }
    for (std::size_t p = 0; p < s.size(); ++p) s[p] += noise(eng);
    ds.samples.push_back(std::move(s));
    ds.labels.push_back(label);
  }
  return ds;
}

namespace {

Tensor load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image file " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw DataError("unsupported image format in " + path + " (need binary PGM/P5)");
  auto next_token = [&in, &path]() -> long {
    // skips whitespace and '#' comment lines
    for (;;) {
      int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long v = -1;
    in >> v;
    if (!in || v < 0) throw DataError("malformed PGM header in " + path);
    return v;
  };
  const long w = next_token();
  const long h = next_token();
  const long maxval = next_token();
  if (maxval <= 0 || maxval > 255) throw DataError("unsupported PGM maxval in " + path);
  in.get();  // single whitespace after maxval
  std::vector<unsigned char> raw(static_cast<std::size_t>(w * h));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw DataError("truncated PGM pixel data in " + path);
  }
  Tensor t({1, static_cast<std::size_t>(h), static_cast<std::size_t>(w)});
  for (std::size_t i = 0; i < raw.size(); ++i) t[i] = static_cast<double>(raw[i]) / static_cast<double>(maxval);
  return t;
}

}  // namespace

Dataset load_image_dir(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open manifest " + manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  Dataset ds;
  std::string line;
  int max_label = -1;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("filename,", 0) == 0) continue;  // header row
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError("malformed manifest line " + std::to_string(lineno) + " in " + manifest_path);
    }
    const std::string file = line.substr(0, comma);
    int label = 0;
    try {
      label = std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw DataError("bad label on manifest line " + std::to_string(lineno) + " in " + manifest_path);
    }
    if (label < 0) throw DataError("negative label on manifest line " + std::to_string(lineno));
    Tensor img = load_pgm((base / file).string());
    if (!ds.samples.empty() && img.shape() != ds.samples.front().shape()) {
      throw DataError("image " + file + " has shape " + shape_to_string(img.shape()) + ", expected " +
                      shape_to_string(ds.samples.front().shape()));
    }
    ds.samples.push_back(std::move(img));
    ds.labels.push_back(label);
    max_label = std::max(max_label, label);
  }
  if (ds.empty()) throw DataError("manifest " + manifest_path + " lists no samples");
  ds.num_classes = static_cast<std::size_t>(max_label) + 1;
  return ds;
}

std::string save_image_dir(const Dataset& ds, const std::string& dir) {
  if (ds.empty()) throw DataError("save_image_dir: empty dataset");
  fs::create_directories(dir);
  std::ofstream manifest(fs::path(dir) / "manifest.csv");
  if (!manifest) throw IoError("cannot write manifest in " + dir);
  manifest << "filename,label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Tensor& s = ds.samples[i];
    if (s.ndim() != 3 || s.shape()[0] != 1) {
      throw DataError("save_image_dir needs (1,H,W) samples, got " + shape_to_string(s.shape()));
    }
    char name[32];
    std::snprintf(name, sizeof(name), "img%05zu.pgm", i);
    const fs::path p = fs::path(dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << "P5\n" << s.shape()[2] << " " << s.shape()[1] << "\n255\n";
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double v = std::clamp(s[j], 0.0, 1.0);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
    manifest << name << "," << ds.labels[i] << "\n";
  }
  return (fs::path(dir) / "manifest.csv").string();
}

Tensor stack_batch(const Dataset& ds, const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw DataError("stack_batch: empty index list");
  const Shape& sample = ds.samples[indices[0]].shape();
  Shape out_shape = sample;
  out_shape.insert(out_shape.begin(), indices.size());
  Tensor out(out_shape);
  const std::size_t stride = shape_size(sample);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const Tensor& s = ds.samples[indices[i]];
    std::copy(s.data().begin(), s.data().end(), out.data().begin() + static_cast<long>(i * stride));
  }
  return out;
}

}  // namespace fitact
