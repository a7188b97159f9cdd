#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "fitact/dataset.hpp"
#include "fitact/errors.hpp"

using namespace fitact;
namespace fs = std::filesystem;

TEST_SUITE("dataset") {

TEST_CASE("blobs are balanced, 2-D and deterministic") {
  const Dataset a = make_blobs(200, 42);
  CHECK(a.size() == 200);
  CHECK(a.num_classes == 4);
  std::vector<int> counts(4, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.samples[i].shape() == Shape{2});
    counts[static_cast<std::size_t>(a.labels[i])]++;
  }
  for (int c : counts) CHECK(c == 50);
  const Dataset b = make_blobs(200, 42);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.samples[i] == b.samples[i]);
  const Dataset c = make_blobs(200, 43);
  CHECK(a.samples[0].data() != c.samples[0].data());
}

TEST_CASE("glyphs are 12x12 grayscale over ten classes") {
  const Dataset ds = make_glyphs(100, 7);
  CHECK(ds.num_classes == 10);
  std::set<int> seen;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(ds.samples[i].shape() == Shape{1, 12, 12});
    seen.insert(ds.labels[i]);
  }
  CHECK(seen.size() == 10);
  // glyph pixels carry real signal above the noise floor
  double maxv = 0.0;
  for (double v : ds.samples[0].data()) maxv = std::max(maxv, v);
  CHECK(maxv > 0.5);
}

TEST_CASE("split keeps every sample exactly once") {
  const Dataset ds = make_blobs(100, 3);
  const auto [train, val] = split_dataset(ds, 0.2, 9);
  CHECK(train.size() == 80);
  CHECK(val.size() == 20);
  CHECK(train.num_classes == 4);
  std::multiset<double> all, original;
  for (const Tensor& s : ds.samples) original.insert(s[0]);
  for (const Tensor& s : train.samples) all.insert(s[0]);
  for (const Tensor& s : val.samples) all.insert(s[0]);
  CHECK(all == original);
  // deterministic
  const auto [train2, val2] = split_dataset(ds, 0.2, 9);
  CHECK(train2.samples[0] == train.samples[0]);
  CHECK_THROWS_AS(split_dataset(ds, 1.5, 9), ConfigError);
  CHECK_THROWS_AS(split_dataset(Dataset{}, 0.2, 9), DataError);
}

TEST_CASE("image directory round trip") {
  const Dataset ds = make_glyphs(20, 11);
  const fs::path dir = fs::temp_directory_path() / "fitact_ds_test";
  fs::remove_all(dir);
  const std::string manifest = save_image_dir(ds, dir.string());
  const Dataset back = load_image_dir(manifest);
  REQUIRE(back.size() == ds.size());
  CHECK(back.num_classes == 10);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.labels[i] == ds.labels[i]);
    CHECK(back.samples[i].shape() == ds.samples[i].shape());
    for (std::size_t p = 0; p < back.samples[i].size(); ++p) {
      const double clipped = std::clamp(ds.samples[i][p], 0.0, 1.0);
      CHECK(std::abs(back.samples[i][p] - clipped) <= 0.5 / 255.0 + 1e-12);
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("loader rejects broken manifests") {
  const fs::path dir = fs::temp_directory_path() / "fitact_ds_bad";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream m(dir / "manifest.csv");
    m << "filename,label\nmissing.pgm,0\n";
  }
  CHECK_THROWS_AS(load_image_dir((dir / "manifest.csv").string()), DataError);
  {
    std::ofstream m(dir / "manifest.csv");
    m << "filename,label\nnocomma\n";
  }
  CHECK_THROWS_AS(load_image_dir((dir / "manifest.csv").string()), DataError);
  {
    std::ofstream m(dir / "manifest.csv");
    m << "filename,label\n";
  }
  CHECK_THROWS_AS(load_image_dir((dir / "manifest.csv").string()), DataError);
  CHECK_THROWS_AS(load_image_dir((dir / "absent.csv").string()), DataError);
  fs::remove_all(dir);
}

TEST_CASE("stack_batch gathers rows") {
  const Dataset ds = make_blobs(10, 1);
  const Tensor batch = stack_batch(ds, {0, 3, 7});
  CHECK(batch.shape() == Shape{3, 2});
  CHECK(batch[0] == ds.samples[0][0]);
  CHECK(batch[2] == ds.samples[3][0]);
  CHECK(batch[5] == ds.samples[7][1]);
}

}  // TEST_SUITE
