#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fitact/tensor.hpp"

namespace fitact {

/// Labeled classification samples. All samples share one shape.
struct Dataset {
  std::vector<Tensor> samples;
  std::vector<int> labels;
  std::size_t num_classes = 0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

/// Deterministic shuffled split into (train, validation).
std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double val_fraction, std::uint64_t seed);

/// 2-D Gaussian blobs, four classes at the corner positions.
Dataset make_blobs(std::size_t n, std::uint64_t seed);

/// 12x12 grayscale digit-style glyphs, ten classes, with random placement,
/// contrast, and pixel noise.
Dataset make_glyphs(std::size_t n, std::uint64_t seed);

/// Loads an image directory: a manifest.csv of `filename,label` rows next to
/// 8-bit binary PGM files. Samples come back as (1,H,W) tensors in [0,1].
Dataset load_image_dir(const std::string& manifest_path);

/// Writes a dataset of (1,H,W) samples as PGM files plus manifest.csv.
/// Returns the manifest path.
std::string save_image_dir(const Dataset& ds, const std::string& dir);

/// Gathers the given samples into one (B, ...) tensor.
Tensor stack_batch(const Dataset& ds, const std::vector<std::size_t>& indices);

}  // namespace fitact
