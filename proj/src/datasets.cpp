#include "adbn/datasets.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace adbn {

void LabeledDataset::validate() const {
  if (samples.size() != labels.size())
    throw DataError("dataset: sample/label count mismatch");
  for (const Vec& s : samples) {
    if (s.size() != dimension) throw DataError("dataset: sample dimension mismatch");
    for (double v : s)
      if (!(v >= 0.0 && v <= 1.0)) throw DataError("dataset: value outside [0,1]");
  }
  for (std::size_t y : labels)
    if (y >= class_count) throw DataError("dataset: label out of range");
}

namespace {

constexpr std::size_t kCifarRecord = 3073;  // 1 label + 3 * 1024 pixels
constexpr std::size_t kCifarPerBatch = 10000;

void load_cifar_batch(const std::string& path, LabeledDataset& out, bool grayscale) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cifar10: cannot open " + path);
  std::vector<unsigned char> record(kCifarRecord);
  for (std::size_t rec = 0; rec < kCifarPerBatch; ++rec) {
    f.read(reinterpret_cast<char*>(record.data()), static_cast<std::streamsize>(kCifarRecord));
    if (f.gcount() != static_cast<std::streamsize>(kCifarRecord))
      throw DataError("cifar10: " + path + " truncated at byte offset " +
                      std::to_string(rec * kCifarRecord + static_cast<std::size_t>(f.gcount())));
    const unsigned label = record[0];
    if (label >= 10)
      throw DataError("cifar10: " + path + " record " + std::to_string(rec) +
                      " has label byte " + std::to_string(label));
    Vec sample;
    if (grayscale) {
      sample.resize(1024);
      for (std::size_t p = 0; p < 1024; ++p)
        sample[p] = (record[1 + p] + record[1 + 1024 + p] + record[1 + 2048 + p]) / (3.0 * 255.0);
    } else {
      sample.resize(3072);
      for (std::size_t p = 0; p < 3072; ++p) sample[p] = record[1 + p] / 255.0;
    }
    out.samples.push_back(std::move(sample));
    out.labels.push_back(label);
  }
}

}  // namespace

Cifar10Data load_cifar10(const std::string& dir, bool grayscale) {
  Cifar10Data data;
  data.train.class_count = data.test.class_count = 10;
  data.train.dimension = data.test.dimension = grayscale ? 1024 : 3072;
  for (int b = 1; b <= 5; ++b)
    load_cifar_batch(dir + "/data_batch_" + std::to_string(b) + ".bin", data.train, grayscale);
  load_cifar_batch(dir + "/test_batch.bin", data.test, grayscale);
  return data;
}

ZcaTransform fit_zca(const std::vector<Vec>& data, double epsilon) {
  if (data.size() < 2) throw DataError("fit_zca: need at least 2 samples");
  if (epsilon <= 0.0) throw DataError("fit_zca: epsilon must be > 0");
  const std::size_t n = data.size();
  const std::size_t d = data.front().size();

  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r][c];

  Eigen::RowVectorXd mean = X.colwise().mean();
  X.rowwise() -= mean;
  Eigen::MatrixXd cov = (X.adjoint() * X) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Eigen::VectorXd inv_sqrt =
      (es.eigenvalues().array().max(0.0) + epsilon).rsqrt().matrix();
  Eigen::MatrixXd Wm =
      es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();

  ZcaTransform t;
  t.epsilon = epsilon;
  t.dim = d;
  t.mean.assign(mean.data(), mean.data() + d);
  t.whitening.resize(d * d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      t.whitening[r * d + c] = Wm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return t;
}

Vec zca_whiten(const ZcaTransform& t, const Vec& x) {
  if (x.size() != t.dim) throw DataError("zca_whiten: dimension mismatch");
  Vec out(t.dim, 0.0);
  for (std::size_t r = 0; r < t.dim; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < t.dim; ++c) acc += t.whitening[r * t.dim + c] * (x[c] - t.mean[c]);
    out[r] = acc;
  }
  return out;
}

std::vector<Vec> apply_zca(const ZcaTransform& t, const std::vector<Vec>& data, RescaleMap& map,
                           bool fit_range) {
  std::vector<Vec> white;
  white.reserve(data.size());
  for (const Vec& x : data) white.push_back(zca_whiten(t, x));

  if (fit_range) {
    map.lo = white.front().front();
    map.hi = map.lo;
    for (const Vec& x : white)
      for (double v : x) {
        map.lo = std::min(map.lo, v);
        map.hi = std::max(map.hi, v);
      }
    if (map.hi == map.lo) map.hi = map.lo + 1.0;
    map.clamped = 0;
  }

  const double span = map.hi - map.lo;
  for (Vec& x : white)
    for (double& v : x) {
      v = (v - map.lo) / span;
      if (v < 0.0) { v = 0.0; ++map.clamped; }
      if (v > 1.0) { v = 1.0; ++map.clamped; }
    }
  return white;
}

LabeledDataset bars_and_stripes(std::size_t n, std::size_t count, RngStream& rng) {
  if (n < 2) throw DataError("bars_and_stripes: n must be >= 2");
  LabeledDataset out;
  out.dimension = n * n;
  out.class_count = 2;
  for (std::size_t s = 0; s < count; ++s) {
    const bool stripes = rng.bernoulli(0.5);
    std::vector<bool> mask(n);
    for (std::size_t k = 0; k < n; ++k) mask[k] = rng.bernoulli(0.5);
    Vec img(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        img[r * n + c] = mask[stripes ? c : r] ? 1.0 : 0.0;
    out.samples.push_back(std::move(img));
    out.labels.push_back(stripes ? 1 : 0);
  }
  return out;
}

LabeledDataset confusable_pair(std::size_t dim, std::size_t count, double overlap,
                               RngStream& rng) {
  if (overlap < 0.0 || overlap > 1.0) throw DataError("confusable_pair: overlap outside [0,1]");
  LabeledDataset out;
  out.dimension = dim;
  out.class_count = 2;

  // Prototypes: half the bits active each, sharing `overlap` of them.
  const std::size_t active = dim / 2;
  const std::size_t shared = static_cast<std::size_t>(std::round(overlap * active));
  Vec proto_a(dim, 0.0), proto_b(dim, 0.0);
  for (std::size_t k = 0; k < active; ++k) proto_a[k] = 1.0;
  for (std::size_t k = 0; k < shared; ++k) proto_b[k] = 1.0;
  for (std::size_t k = 0; k + shared < active && active + k < dim; ++k) proto_b[active + k] = 1.0;

  for (std::size_t s = 0; s < count; ++s) {
    const bool is_b = rng.bernoulli(0.5);
    const Vec& proto = is_b ? proto_b : proto_a;
    Vec x = proto;
    for (double& v : x)
      if (rng.bernoulli(0.05)) v = 1.0 - v;
    out.samples.push_back(std::move(x));
    out.labels.push_back(is_b ? 1 : 0);
  }
  return out;
}

void write_csv_dataset(const LabeledDataset& data, std::ostream& os) {
  os << data.dimension << ',' << data.class_count << '\n';
  os.precision(17);
  for (std::size_t n = 0; n < data.samples.size(); ++n) {
    os << data.labels[n];
    for (double v : data.samples[n]) os << ',' << v;
    os << '\n';
  }
}

LabeledDataset read_csv_dataset(std::istream& is) {
  LabeledDataset out;
  std::string line;
  if (!std::getline(is, line)) throw DataError("csv dataset: missing header");
  {
    std::istringstream ss(line);
    char comma;
    if (!(ss >> out.dimension >> comma >> out.class_count))
      throw DataError("csv dataset: bad header: " + line);
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::size_t label;
    char comma;
    if (!(ss >> label)) throw DataError("csv dataset: bad row: " + line);
    Vec sample;
    sample.reserve(out.dimension);
    double v;
    while (ss >> comma >> v) sample.push_back(v);
    if (sample.size() != out.dimension)
      throw DataError("csv dataset: row has " + std::to_string(sample.size()) +
                      " values, expected " + std::to_string(out.dimension));
    out.samples.push_back(std::move(sample));
    out.labels.push_back(label);
  }
  out.validate();
  return out;
}

}  // namespace adbn
