#include "adbn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace adbn {

namespace {

constexpr char kMagic[4] = {'A', 'D', 'B', 'N'};

void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), 8);
}

void put_vec(std::ostream& os, const Vec& v) {
  put_u64(os, v.size());
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v;
  is.read(reinterpret_cast<char*>(&v), 4);
  if (!is) throw CheckpointError("checkpoint: unexpected end of stream");
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v;
  is.read(reinterpret_cast<char*>(&v), 8);
  if (!is) throw CheckpointError("checkpoint: unexpected end of stream");
  return v;
}

Vec get_vec(std::istream& is, std::uint64_t expected) {
  const std::uint64_t n = get_u64(is);
  if (n != expected)
    throw CheckpointError("checkpoint: array length " + std::to_string(n) +
                          " does not match declared dimensions " + std::to_string(expected));
  Vec v(n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw CheckpointError("checkpoint: unexpected end of stream");
  return v;
}

}  // namespace

void save_checkpoint(const DbnModel& model, std::ostream& os) {
  os.write(kMagic, 4);
  put_u32(os, kCheckpointVersion);
  put_u32(os, static_cast<std::uint32_t>(model.layers.size()));
  put_u32(os, static_cast<std::uint32_t>(model.head.class_count));
  for (const RbmParams& layer : model.layers) {
    put_u32(os, static_cast<std::uint32_t>(layer.visible_count));
    put_u32(os, static_cast<std::uint32_t>(layer.hidden_count));
    put_vec(os, layer.b);
    put_vec(os, layer.c);
    put_vec(os, layer.W);
  }
  put_u32(os, static_cast<std::uint32_t>(model.head.input_dim));
  put_vec(os, model.head.weights);
  put_vec(os, model.head.biases);
  put_u32(os, static_cast<std::uint32_t>(model.rules.size()));
  for (const Rule& r : model.rules) {
    put_u32(os, static_cast<std::uint32_t>(r.layer));
    put_u32(os, static_cast<std::uint32_t>(r.antecedent.size()));
    for (std::size_t j : r.antecedent) put_u32(os, static_cast<std::uint32_t>(j));
    put_u32(os, static_cast<std::uint32_t>(r.consequent));
  }
}

DbnModel load_checkpoint(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw CheckpointError("checkpoint: bad magic, expected \"ADBN\"");
  const std::uint32_t version = get_u32(is);
  if (version != kCheckpointVersion)
    throw CheckpointError("checkpoint: unsupported format version " + std::to_string(version));

  DbnModel model;
  const std::uint32_t layer_count = get_u32(is);
  const std::uint32_t class_count = get_u32(is);
  for (std::uint32_t l = 0; l < layer_count; ++l) {
    const std::uint32_t I = get_u32(is);
    const std::uint32_t J = get_u32(is);
    RbmParams p(I, J);
    p.b = get_vec(is, I);
    p.c = get_vec(is, J);
    p.W = get_vec(is, static_cast<std::uint64_t>(I) * J);
    model.layers.push_back(std::move(p));
  }
  const std::uint32_t head_dim = get_u32(is);
  model.head = ClassifierHead(head_dim, class_count);
  model.head.weights = get_vec(is, static_cast<std::uint64_t>(head_dim) * class_count);
  model.head.biases = get_vec(is, class_count);
  const std::uint32_t rule_count = get_u32(is);
  for (std::uint32_t r = 0; r < rule_count; ++r) {
    Rule rule;
    rule.layer = get_u32(is);
    const std::uint32_t nant = get_u32(is);
    for (std::uint32_t a = 0; a < nant; ++a) rule.antecedent.push_back(get_u32(is));
    rule.consequent = get_u32(is);
    model.rules.push_back(std::move(rule));
  }
  model.check_chaining();
  return model;
}

void save_checkpoint_file(const DbnModel& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("checkpoint: cannot open " + path + " for writing");
  save_checkpoint(model, f);
  if (!f) throw CheckpointError("checkpoint: write failed for " + path);
}

DbnModel load_checkpoint_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("checkpoint: cannot open " + path);
  return load_checkpoint(f);
}

}  // namespace adbn
