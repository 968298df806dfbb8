#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "adbn/datasets.hpp"
#include "doctest.h"

using namespace adbn;
namespace fs = std::filesystem;

namespace {

// Writes a CIFAR-format batch file with the given number of records; label
// pattern is record index mod 10 unless overridden.
void write_fake_batch(const std::string& path, std::size_t records, int forced_label = -1,
                      bool truncate_last = false) {
  std::ofstream f(path, std::ios::binary);
  for (std::size_t r = 0; r < records; ++r) {
    unsigned char label = forced_label >= 0 ? static_cast<unsigned char>(forced_label)
                                            : static_cast<unsigned char>(r % 10);
    f.put(static_cast<char>(label));
    const std::size_t pixels = (truncate_last && r + 1 == records) ? 100 : 3072;
    for (std::size_t p = 0; p < pixels; ++p) f.put(static_cast<char>((r + p) % 256));
  }
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("adbn_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("cifar10 loader: well-formed batches, framing and label errors") {
  TempDir dir;
  for (int b = 1; b <= 5; ++b)
    write_fake_batch((dir.path / ("data_batch_" + std::to_string(b) + ".bin")).string(), 10000);
  write_fake_batch((dir.path / "test_batch.bin").string(), 10000);

  Cifar10Data data = load_cifar10(dir.path.string());
  CHECK(data.train.samples.size() == 50000);
  CHECK(data.test.samples.size() == 10000);
  CHECK(data.train.samples[0].size() == 3072);
  data.test.validate();

  Cifar10Data gray = load_cifar10(dir.path.string(), true);
  CHECK(gray.train.samples[0].size() == 1024);

  write_fake_batch((dir.path / "test_batch.bin").string(), 10000, -1, true);
  CHECK_THROWS_WITH_AS(load_cifar10(dir.path.string()), doctest::Contains("byte offset"),
                       DataError);

  write_fake_batch((dir.path / "test_batch.bin").string(), 10000, 10);
  CHECK_THROWS_WITH_AS(load_cifar10(dir.path.string()), doctest::Contains("label byte 10"),
                       DataError);

  CHECK_THROWS_AS(load_cifar10((dir.path / "missing").string()), DataError);
}

TEST_CASE("fit_zca: near-identity on already-white data") {
  RngStream rng(1);
  std::vector<Vec> data;
  for (int n = 0; n < 4000; ++n) {
    Vec x(4);
    // approximate standard normal via sum of uniforms
    for (double& v : x) {
      double s = 0.0;
      for (int k = 0; k < 12; ++k) s += rng.uniform();
      v = s - 6.0;
    }
    data.push_back(std::move(x));
  }
  ZcaTransform t = fit_zca(data, 1e-6);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c)
      CHECK(t.whitening[r * 4 + c] == doctest::Approx(r == c ? 1.0 : 0.0).epsilon(0.05));
}

TEST_CASE("fit_zca: symmetric matrix, epsilon dominates in the limit") {
  RngStream rng(3);
  std::vector<Vec> data;
  for (int n = 0; n < 50; ++n) {
    Vec x(3);
    for (double& v : x) v = rng.uniform();
    data.push_back(std::move(x));
  }
  ZcaTransform t = fit_zca(data, 0.01);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(t.whitening[r * 3 + c] == doctest::Approx(t.whitening[c * 3 + r]).epsilon(1e-8));

  const double big = 1e8;
  ZcaTransform huge = fit_zca(data, big);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(huge.whitening[r * 3 + c] ==
            doctest::Approx(r == c ? 1.0 / std::sqrt(big) : 0.0).epsilon(1e-4));

  CHECK_THROWS_AS(fit_zca({data[0]}, 0.01), DataError);
}

TEST_CASE("fit_zca: two-point dataset whitens to unit variance along the axis") {
  Vec x = {2.0, 0.0};
  std::vector<Vec> data = {x, {-2.0, 0.0}};
  const double eps = 1e-8;
  ZcaTransform t = fit_zca(data, eps);
  // sample variance along dim 0 is 8; whitened coordinate 2/sqrt(8+eps)
  Vec w = zca_whiten(t, x);
  CHECK(w[0] == doctest::Approx(2.0 / std::sqrt(8.0 + eps)).epsilon(1e-6));
  // unbiased sample variance of {w, -w}: 2 w^2 / (2 - 1)
  double var = 2.0 * w[0] * w[0];
  CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("apply_zca: training min/max map to exactly 0 and 1, test values clamp") {
  RngStream rng(5);
  std::vector<Vec> train;
  for (int n = 0; n < 60; ++n) {
    Vec x(3);
    for (double& v : x) v = rng.uniform();
    train.push_back(std::move(x));
  }
  ZcaTransform t = fit_zca(train, 0.01);
  RescaleMap map;
  std::vector<Vec> scaled = apply_zca(t, train, map, true);
  double lo = 1.0, hi = 0.0;
  for (const Vec& x : scaled)
    for (double v : x) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi == doctest::Approx(1.0));
  CHECK(map.clamped == 0);

  std::vector<Vec> wild = {{100.0, -100.0, 0.5}};
  std::vector<Vec> test_scaled = apply_zca(t, wild, map, false);
  CHECK(map.clamped >= 2);
  for (double v : test_scaled[0]) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("bars_and_stripes: only valid patterns, deterministic, 2x2 family") {
  RngStream rng(7);
  LabeledDataset data = bars_and_stripes(2, 200, rng);
  data.validate();

  // Enumerate the valid 2x2 patterns directly from the definition.
  std::set<std::vector<int>> valid;
  for (int mask = 0; mask < 4; ++mask)
    for (int orient = 0; orient < 2; ++orient) {
      std::vector<int> img(4, 0);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          img[r * 2 + c] = ((mask >> (orient ? c : r)) & 1);
      valid.insert(img);
    }
  CHECK(valid.size() == 6);  // 8 masks collapse: all-on and all-off shared

  for (const Vec& s : data.samples) {
    std::vector<int> img(4);
    for (int k = 0; k < 4; ++k) img[k] = static_cast<int>(s[k]);
    CHECK(valid.count(img) == 1);
  }

  RngStream rng2(7);
  LabeledDataset again = bars_and_stripes(2, 200, rng2);
  CHECK(again.samples == data.samples);
  CHECK(again.labels == data.labels);

  RngStream rng3(7);
  CHECK_THROWS_AS(bars_and_stripes(1, 10, rng3), DataError);
}

TEST_CASE("confusable_pair: overlap extremes behave as documented") {
  RngStream rng(11);
  LabeledDataset sep = confusable_pair(32, 400, 0.0, rng);
  sep.validate();

  // overlap=0: a nearest-prototype classifier on raw bits is near perfect
  auto proto_accuracy = [](const LabeledDataset& d) {
    Vec mean0(d.dimension, 0.0), mean1(d.dimension, 0.0);
    double n0 = 0, n1 = 0;
    for (std::size_t n = 0; n < d.samples.size(); ++n) {
      Vec& m = d.labels[n] ? mean1 : mean0;
      (d.labels[n] ? n1 : n0) += 1;
      for (std::size_t k = 0; k < d.dimension; ++k) m[k] += d.samples[n][k];
    }
    for (double& v : mean0) v /= n0;
    for (double& v : mean1) v /= n1;
    std::size_t hits = 0;
    for (std::size_t n = 0; n < d.samples.size(); ++n) {
      double d0 = 0, d1 = 0;
      for (std::size_t k = 0; k < d.dimension; ++k) {
        d0 += (d.samples[n][k] - mean0[k]) * (d.samples[n][k] - mean0[k]);
        d1 += (d.samples[n][k] - mean1[k]) * (d.samples[n][k] - mean1[k]);
      }
      if ((d1 < d0 ? 1u : 0u) == d.labels[n]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(d.samples.size());
  };
  CHECK(proto_accuracy(sep) >= 0.99);

  RngStream rng2(13);
  LabeledDataset same = confusable_pair(32, 400, 1.0, rng2);
  // identical prototypes: both class means coincide up to noise
  CHECK(proto_accuracy(same) < 0.75);

  RngStream rng3(13);
  CHECK_THROWS_AS(confusable_pair(32, 10, 1.5, rng3), DataError);
}

TEST_CASE("csv dataset round-trip and validation") {
  LabeledDataset data;
  data.dimension = 3;
  data.class_count = 2;
  data.samples = {{0.0, 0.5, 1.0}, {1.0, 0.25, 0.0}};
  data.labels = {1, 0};

  std::ostringstream os;
  write_csv_dataset(data, os);
  std::istringstream is(os.str());
  LabeledDataset back = read_csv_dataset(is);
  CHECK(back.samples == data.samples);
  CHECK(back.labels == data.labels);
  CHECK(back.class_count == 2);

  std::istringstream bad("3,2\n1,0.5,0.5\n");
  CHECK_THROWS_AS(read_csv_dataset(bad), DataError);  // short row
}
