#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "adbn/rbm.hpp"
#include "adbn/rng.hpp"

namespace adbn {

// Thrown on malformed or missing data files; message names the file and,
// for framing problems, the byte offset.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LabeledDataset {
  std::vector<Vec> samples;  // values in [0,1]
  std::vector<std::size_t> labels;
  std::size_t class_count = 0;
  std::size_t dimension = 0;

  void validate() const;  // throws DataError on any broken invariant
};

struct Cifar10Data {
  LabeledDataset train;  // 50,000
  LabeledDataset test;   // 10,000
};

// Standard binary batches (record = 1 label byte + 3072 channel-major pixel
// bytes), pixels scaled to [0,1]. grayscale reduces to 1024 dims by RGB mean.
Cifar10Data load_cifar10(const std::string& dir, bool grayscale = false);

struct ZcaTransform {
  Vec mean;       // length d
  Vec whitening;  // d x d, row-major, symmetric
  double epsilon = 0.01;
  std::size_t dim = 0;
};

ZcaTransform fit_zca(const std::vector<Vec>& data, double epsilon = 0.01);

Vec zca_whiten(const ZcaTransform& t, const Vec& x);

struct RescaleMap {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t clamped = 0;  // out-of-range test values clamped, counted
};

// Whiten and min-max rescale the training split into [0,1]; the returned
// map replays the same affine transform (with clamping) on other splits.
std::vector<Vec> apply_zca(const ZcaTransform& t, const std::vector<Vec>& data, RescaleMap& map,
                           bool fit_range);

// n x n binary images, full horizontal bars (label 0) or vertical stripes
// (label 1). The all-on/all-off images belong to both families and are
// labeled by the sampled branch.
LabeledDataset bars_and_stripes(std::size_t n, std::size_t count, RngStream& rng);

// Two classes from prototype bit templates sharing `overlap` of their active
// bits, plus 5% per-bit flip noise.
LabeledDataset confusable_pair(std::size_t dim, std::size_t count, double overlap,
                               RngStream& rng);

void write_csv_dataset(const LabeledDataset& data, std::ostream& os);
LabeledDataset read_csv_dataset(std::istream& is);

}  // namespace adbn
