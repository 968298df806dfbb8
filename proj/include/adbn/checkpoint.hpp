#pragma once

#include <iosfwd>
#include <string>

#include "adbn/dbn.hpp"

namespace adbn {

// Thrown on a malformed or incompatible checkpoint.
struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Versioned binary container: magic "ADBN", format version, layer count,
// class count, per-layer dimensions, then b/c/W as length-prefixed arrays of
// 64-bit little-endian floats (row-major), head weights/biases, rules.
// Byte-exact round trip.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const DbnModel& model, std::ostream& os);
DbnModel load_checkpoint(std::istream& is);

void save_checkpoint_file(const DbnModel& model, const std::string& path);
DbnModel load_checkpoint_file(const std::string& path);

}  // namespace adbn
